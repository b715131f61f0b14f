fn main() {
    std::process::exit(mftriple::cli::run(std::env::args_os()));
}
