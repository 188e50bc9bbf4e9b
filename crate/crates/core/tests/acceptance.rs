//! Runs `toricray verify --suite all` twice at the default grid and reports
//! one line per acceptance criterion.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode, Output};

struct Row {
    suite: String,
    check: String,
    residual: String,
    relation: String,
    threshold: String,
    pass: bool,
}

fn read_checks(dir: &Path) -> Vec<Row> {
    let text = std::fs::read_to_string(dir.join("checks.csv")).expect("checks.csv");
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 6, "malformed row `{line}`");
            Row {
                suite: f[0].into(),
                check: f[1].into(),
                residual: f[2].into(),
                relation: f[3].into(),
                threshold: f[4].into(),
                pass: f[5] == "true",
            }
        })
        .collect()
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

/// `(suite, check-name prefix)` pairs selecting the rows of one criterion.
struct Criterion {
    id: u32,
    title: &'static str,
    selectors: &'static [(&'static str, &'static str)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "energy is affine along segments between random endpoints",
        selectors: &[("geodesics", "segment_energy_affine")],
    },
    Criterion {
        id: 2,
        title: "segments agree with the independent solver and converge under refinement",
        selectors: &[("geodesics", "oracle_agreement"), ("geodesics", "oracle_refinement_ratio")],
    },
    Criterion {
        id: 3,
        title: "difference-quotient spread and Lipschitz bound on segments and rays",
        selectors: &[
            ("geodesics", "segment_quotient_spread"),
            ("geodesics", "segment_lipschitz_excess"),
            ("rays", "quotient_spread"),
            ("rays", "lipschitz_excess"),
        ],
    },
    Criterion {
        id: 4,
        title: "energy bounds for nonpositive potentials",
        selectors: &[("energy", "am_bounds_nonpositive")],
    },
    Criterion {
        id: 5,
        title: "energy slope and mass deficit agree, with base independence",
        selectors: &[
            ("energy", "c_two_path"),
            ("energy", "c_equals_minus_half_lelong"),
            ("energy", "c_base_independent"),
        ],
    },
    Criterion {
        id: 6,
        title: "cutoff rays are monotone, obey the energy law and detect full mass",
        selectors: &[
            ("rays", "monotone_in_l"),
            ("rays", "limit_converged"),
            ("rays", "energy_law"),
            ("rays", "constant_iff_full_mass_iff_zero_c"),
            ("rays", "membership"),
        ],
    },
    Criterion {
        id: 7,
        title: "full-mass envelope test, maximality and transform fixed point",
        selectors: &[
            ("envelopes", "e_check"),
            ("envelopes", "maximality_defect"),
            ("envelopes", "transform_fixed_point"),
        ],
    },
    Criterion {
        id: 8,
        title: "test-curve rays equal cutoff rays with refinement, curve identities",
        selectors: &[("rwn", "")],
    },
    Criterion {
        id: 9,
        title: "projection and bracket algebra",
        selectors: &[("envelopes", "proj_"), ("envelopes", "bracket_")],
    },
];

fn verify_run(out: &Path) -> std::process::Child {
    Command::new(env!("CARGO_BIN_EXE_toricray"))
        .args(["verify", "--suite", "all", "--out"])
        .arg(out)
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .expect("spawn toricray")
}

fn report_failure(out: &Output) {
    for line in String::from_utf8_lossy(&out.stdout).lines().filter(|l| l.contains("FAIL")) {
        eprintln!("    {line}");
    }
    eprint!("{}", String::from_utf8_lossy(&out.stderr));
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let tmp = tempfile::tempdir().expect("tempdir");
    let (a, b) = (tmp.path().join("first"), tmp.path().join("second"));
    let (run_a, run_b) = (verify_run(&a), verify_run(&b));
    let out_a = run_a.wait_with_output().expect("first run");
    let out_b = run_b.wait_with_output().expect("second run");

    let rows = read_checks(&a);
    let mut all_ok = true;
    for c in CRITERIA {
        let selected: Vec<&Row> = rows
            .iter()
            .filter(|r| c.selectors.iter().any(|(s, p)| r.suite == *s && r.check.starts_with(p)))
            .collect();
        let failed: Vec<&&Row> = selected.iter().filter(|r| !r.pass).collect();
        let ok = !selected.is_empty() && failed.is_empty();
        all_ok &= ok;
        println!(
            "criterion {:>2} {}: {} ({} checks, {} failed)",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            selected.len(),
            failed.len()
        );
        for r in failed {
            println!("    {}/{}: {} {} {}", r.suite, r.check, r.residual, r.relation, r.threshold);
        }
    }

    let files_a = csv_files(&a);
    let files_b = csv_files(&b);
    let identical = !files_a.is_empty() && files_a == files_b;
    let exit_ok = out_a.status.code() == Some(0) && out_b.status.code() == Some(0);
    let ok = identical && exit_ok;
    all_ok &= ok;
    println!(
        "criterion 10 {}: two verify runs give byte-identical CSVs and exit 0 ({} files, identical: {identical}, exit codes {:?} {:?})",
        if ok { "PASS" } else { "FAIL" },
        files_a.len(),
        out_a.status.code(),
        out_b.status.code()
    );
    if !exit_ok {
        report_failure(&out_a);
    }

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
