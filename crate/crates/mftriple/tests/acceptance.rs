//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured deviation and wall time. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use mftriple::oracle::*;
use std::time::Instant;

fn report_line(criterion: &str, rep: &OracleReport) {
    println!(
        "{} criterion {}: {} (max_dev {:.3e}, {} ms)",
        if rep.pass { "PASS" } else { "FAIL" },
        criterion,
        rep.name,
        rep.max_dev,
        rep.wall_ms
    );
    assert!(rep.pass, "criterion {criterion} failed: {rep:?}");
}

#[test]
fn criterion_01_kloosterman_identities() {
    let start = Instant::now();
    for q in [3, 5, 7, 9] {
        let rep = verify_kloosterman(q);
        report_line("1", &rep);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("PASS criterion 1: total runtime {secs:.2}s (< 10s)");
    assert!(secs < 10.0, "criterion 1 runtime {secs}");
}

#[test]
fn criterion_02_multiplicity_freeness() {
    let start = Instant::now();
    for q in [3, 5, 7] {
        report_line("2", &verify_cartan_mf_all_nu(q));
        let (gg, trivial) = verify_gelfand_graev(q);
        report_line("2", &gg);
        report_line("2", &trivial);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("PASS criterion 2: total runtime {secs:.2}s (< 60s)");
    assert!(secs < 60.0, "criterion 2 runtime {secs}");
}

#[test]
fn criterion_03_mackey_dimension() {
    report_line("3", &verify_mackey_triple1(3, &[1, 2, 3, 5, 6, 7]));
    report_line("3", &verify_mackey_triple1(5, &[1, 2, 5]));
    report_line("3", &verify_mackey_triple1(7, &[1, 2]));
    // The Gelfand-Graev dimension identity and the second triple's counts
    // are asserted inside their own drivers.
    let (gg, _) = verify_gelfand_graev(3);
    report_line("3", &gg);
    let t2 = verify_triple2(1, 0);
    report_line("3", &t2.counts);
}

#[test]
fn criterion_04_triple1_sphericals() {
    let start = Instant::now();
    for q in [3, 5] {
        let (closed, _) = verify_triple1_sphericals(q);
        report_line("4", &closed);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("PASS criterion 4: total runtime {secs:.2}s (< 120s)");
    assert!(secs < 120.0, "criterion 4 runtime {secs}");
}

#[test]
fn criterion_05_projection_machinery() {
    for q in [3, 5] {
        report_line("5", &verify_projections(q));
    }
}

#[test]
fn criterion_06_triple2() {
    let start = Instant::now();
    let v = verify_triple2(1, 0);
    report_line("6", &v.commutative);
    report_line("6", &v.counts);
    report_line("6", &v.kernel);
    report_line("6", &v.sphericals);
    let secs = start.elapsed().as_secs_f64();
    println!("PASS criterion 6: total runtime {secs:.2}s (< 600s)");
    assert!(secs < 600.0, "criterion 6 runtime {secs}");
}

#[test]
fn criterion_07_fourier_analysis() {
    use mftriple::triples::{special::gelfand_graev_engine, Triple1, Triple2};
    let t1a = Triple1::new(3, 1).unwrap();
    report_line("7", &verify_fourier(&t1a.engine(), "Fourier round trips (triple 1, q=3)", 0));
    let t1b = Triple1::new(5, 1).unwrap();
    report_line("7", &verify_fourier(&t1b.engine(), "Fourier round trips (triple 1, q=5)", 0));
    let gg = gelfand_graev_engine(3, 1);
    report_line("7", &verify_fourier(&gg, "Fourier round trips (Gelfand-Graev, q=3)", 0));
    let t2 = Triple2::new(3, 1).unwrap();
    report_line("7", &verify_fourier(&t2.engine(), "Fourier round trips (triple 2)", 0));
}

#[test]
fn criterion_08_frobenius_schur() {
    for q in [3, 5] {
        let (_, fs) = verify_triple1_sphericals(q);
        report_line("8", &fs);
    }
}

#[test]
fn criterion_09_special_cases() {
    use mftriple::triples::special::{gow_report, ricci_samanta_report};
    let start = Instant::now();
    for q in [3, 5] {
        let rs = ricci_samanta_report(q);
        let rep = OracleReport {
            name: format!("multiplicity pattern (1,1,2,0) for Ind_U(trivial) at q={q}"),
            max_dev: 0.0,
            pass: rs.pattern == (1, 1, 2, 0) && rs.pattern_exact && !rs.trivial_engine_mf,
            wall_ms: start.elapsed().as_millis(),
        };
        report_line("9", &rep);
    }
    let gow = gow_report(3);
    let rep = OracleReport {
        name: "subfield pair is Gelfand with doubled parabolic constituents".into(),
        max_dev: gow.pair_mf.max_commutator,
        pass: gow.pair_mf.mf && gow.parabolic_q_max_mult == 2 && gow.doubled_constituents_ok,
        wall_ms: start.elapsed().as_millis(),
    };
    report_line("9", &rep);
    let secs = start.elapsed().as_secs_f64();
    println!("PASS criterion 9: total runtime {secs:.2}s (< 300s)");
    assert!(secs < 300.0);
}

#[test]
fn criterion_10_normal_subgroup_module() {
    report_line("10", &verify_normal_fixtures(0));
}

#[test]
fn criterion_11_oracle_equivalence() {
    report_line("11", &verify_oracle_equivalence(0));
}
