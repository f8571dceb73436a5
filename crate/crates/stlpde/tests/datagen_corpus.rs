//! End-to-end checks of the dataset pipeline: enumeration speed, sampled
//! ranges, text round-trips, and byte-deterministic JSONL emission.

use std::collections::HashSet;
use std::time::Instant;

use stlpde::datagen::{
    emit_dataset, enumerate_formats, sample_instance, DatasetRecord, Split, SyntaxFormat,
};
use stlpde::stl::{parse_cspec, parse_mathform, validate};
use stlpde::{PdeKind, TemporalAtom};

/// Sampled values are exact 6-digit decimals inside the range; their binary
/// images may sit a representation ulp outside bounds that are themselves
/// inexact in binary (e.g. `g0 - 20`), so allow that much slop.
fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    let eps = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    lo - eps <= v && v <= hi + eps
}

fn check_window(lo: f64, hi: f64, range: f64) {
    assert!(in_range(lo, 0.0, range), "window start {lo} outside [0, {range}]");
    assert!(in_range(hi, 0.0, range), "window end {hi} outside [0, {range}]");
    assert!(lo < hi, "window [{lo}, {hi}] must have positive width");
    // Width is drawn from 5–40% of the range, then clipped at the top and
    // rounded; allow rounding slack on both sides.
    let width = hi - lo;
    assert!(width >= 0.049 * range, "window [{lo}, {hi}] narrower than drawn");
    assert!(width <= 0.401 * range, "window [{lo}, {hi}] wider than drawn");
}

#[test]
fn enumeration_is_instant_and_stable() {
    let start = Instant::now();
    let formats = enumerate_formats();
    let again = enumerate_formats();
    let elapsed = start.elapsed();
    assert_eq!(formats.len(), 1374);
    assert_eq!(formats, again);
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "two enumerations took {elapsed:?}, expected well under a second"
    );
}

#[test]
fn ten_thousand_heat_samples_stay_inside_the_published_ranges() {
    let formats = enumerate_formats();
    for trial in 0..10_000u64 {
        let fmt = &formats[(trial as usize) % formats.len()];
        let inst = sample_instance(fmt, PdeKind::Heat, trial);
        let sys = &inst.system;

        assert!(in_range(sys.length, 50.0, 300.0), "length {}", sys.length);
        assert!(in_range(sys.g0, 250.0, 350.0), "boundary temp {}", sys.g0);
        assert!(in_range(sys.tmax, 5.0, 15.0), "horizon {}", sys.tmax);

        assert_eq!(sys.materials.len(), 2);
        let (a, b) = (&sys.materials[0], &sys.materials[1]);
        assert_eq!(a.end, sys.length / 2.0);
        assert_eq!(b.end, sys.length);
        assert!(in_range(a.kappa.unwrap(), 1.2e6, 1.8e6));
        assert!(in_range(b.kappa.unwrap(), 0.4e6, 1.2e6));
        assert!(in_range(a.rho, 3e-6, 6e-6));
        assert!(in_range(b.rho, 3e-6, 6e-6));
        assert!(in_range(a.c.unwrap(), 3e8, 4.5e8));
        assert!(in_range(b.c.unwrap(), 4.5e8, 4.8e8));

        for atom in inst.formula.atoms() {
            check_window(atom.t_lo, atom.t_hi, sys.tmax);
            check_window(atom.pred.x_lo, atom.pred.x_hi, sys.length);
            assert!(in_range(atom.pred.slope, -0.5, 0.5));
            assert!(in_range(atom.pred.intercept - sys.g0, -20.0, 20.0));
        }
        assert!(validate(&inst.formula, sys).valid);
    }
}

#[test]
fn ten_thousand_wave_samples_stay_inside_the_published_ranges() {
    let formats = enumerate_formats();
    for trial in 0..10_000u64 {
        let fmt = &formats[(trial as usize) % formats.len()];
        let inst = sample_instance(fmt, PdeKind::Wave, trial);
        let sys = &inst.system;

        assert!(in_range(sys.length, 60_000.0, 140_000.0), "length {}", sys.length);
        assert!(in_range(sys.tmax, 0.5, 2.0), "horizon {}", sys.tmax);
        assert_eq!(sys.g0, 0.0);

        assert_eq!(sys.materials.len(), 2);
        let (steel, brass) = (&sys.materials[0], &sys.materials[1]);
        assert_eq!(steel.end, sys.length / 2.0);
        assert_eq!(brass.end, sys.length);
        assert!(in_range(steel.rho, 7.6e-6, 8e-6));
        assert!(in_range(brass.rho, 8.4e-6, 8.8e-6));
        assert!(in_range(steel.young.unwrap(), 2e8, 2.4e8));
        assert!(in_range(brass.young.unwrap(), 1e8, 1.8e8));

        for atom in inst.formula.atoms() {
            check_window(atom.t_lo, atom.t_hi, sys.tmax);
            check_window(atom.pred.x_lo, atom.pred.x_hi, sys.length);
            assert!(in_range(atom.pred.slope, -5e-5, 5e-5));
            assert!(in_range(atom.pred.intercept, -3.0, 3.0));
        }
        assert!(validate(&inst.formula, sys).valid);
    }
}

#[test]
fn every_format_round_trips_through_both_text_forms() {
    let formats = enumerate_formats();
    let start = Instant::now();
    for kind in [PdeKind::Heat, PdeKind::Wave] {
        for (idx, fmt) in formats.iter().enumerate() {
            let inst = sample_instance(fmt, kind, idx as u64);

            let from_cspec = parse_cspec(&inst.regions, &inst.cspec).unwrap();
            assert_eq!(from_cspec, inst.formula, "cspec round-trip for {}", fmt.tag());

            let math = stlpde::stl::print_mathform(&inst.formula);
            let from_math = parse_mathform(&math).unwrap();
            assert_eq!(from_math, inst.formula, "math round-trip for {}", fmt.tag());

            // The sampled formula realizes exactly the requested shape.
            let atoms: Vec<TemporalAtom> =
                inst.formula.atoms().into_iter().copied().collect();
            assert_eq!(atoms.len(), fmt.arity());
            for (atom, &(op, cmp)) in atoms.iter().zip(&fmt.atoms) {
                assert_eq!(atom.op, op);
                assert_eq!(atom.pred.cmp, cmp);
            }
            assert_eq!(fmt.structure.build(&atoms), inst.formula);
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "2×1374 samples with round-trips took {elapsed:?}, expected under a minute"
    );
}

#[test]
fn natural_language_distinguishes_instances_within_a_format() {
    let formats = enumerate_formats();
    // One format per arity: G<, (G< & F>)-ish, and a parenthesized triple.
    for fmt_idx in [0usize, 10, 200] {
        let fmt = &formats[fmt_idx];
        let mut nls = HashSet::new();
        let mut formulas = Vec::new();
        for seed in 0..300u64 {
            let inst = sample_instance(fmt, PdeKind::Heat, seed);
            assert!(
                nls.insert(inst.nl.clone()),
                "two distinct instances of {} rendered identical text",
                fmt.tag()
            );
            formulas.push(inst.formula);
        }
        formulas.dedup();
        assert_eq!(formulas.len(), 300, "sampling should not repeat formulas");
    }
}

fn small_format_sample(formats: &[SyntaxFormat]) -> Vec<SyntaxFormat> {
    // One single atom, one conjunction, one disjunction, one of each
    // three-atom family.
    [0, 6, 42, 100, 400, 600, 800, 1000, 1300]
        .iter()
        .map(|&i| formats[i].clone())
        .collect()
}

#[test]
fn emitted_files_hold_checked_records_and_reproduce_byte_for_byte() {
    let formats = enumerate_formats();
    let subset = small_format_sample(&formats);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();

    let summary =
        emit_dataset(&subset, 3, PdeKind::Heat, Split::Train, dir_a.path(), 7).unwrap();
    assert_eq!(summary.records, subset.len() * 3);
    assert_eq!(summary.files.len(), subset.len());

    let mut all_seeds = HashSet::new();
    for (path, fmt) in summary.files.iter().zip(&subset) {
        let name = path.file_name().unwrap().to_str().unwrap();
        assert!(name.starts_with("heat_"), "file name {name}");
        assert!(name.ends_with("_train.jsonl"), "file name {name}");
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        for line in lines {
            let rec: DatasetRecord = serde_json::from_str(line).unwrap();
            let formula = parse_cspec(&rec.regions, &rec.cspec).unwrap();
            assert_eq!(parse_mathform(&rec.stl_math).unwrap(), formula);
            assert_eq!(formula.atom_count(), fmt.arity());
            assert!(validate(&formula, &rec.system).valid);
            // The stored seed regenerates the record exactly.
            let again = sample_instance(fmt, PdeKind::Heat, rec.seed);
            assert_eq!(again.nl, rec.nl);
            assert_eq!(again.cspec, rec.cspec);
            assert!(all_seeds.insert(rec.seed));
        }
    }

    let summary_b =
        emit_dataset(&subset, 3, PdeKind::Heat, Split::Train, dir_b.path(), 7).unwrap();
    for (a, b) in summary.files.iter().zip(&summary_b.files) {
        assert_eq!(
            std::fs::read(a).unwrap(),
            std::fs::read(b).unwrap(),
            "same inputs must emit identical bytes"
        );
    }
}

#[test]
fn train_and_test_splits_draw_disjoint_samples() {
    let formats = enumerate_formats();
    let subset = small_format_sample(&formats);
    let dir = tempfile::tempdir().unwrap();
    let train =
        emit_dataset(&subset, 2, PdeKind::Wave, Split::Train, dir.path(), 11).unwrap();
    let test = emit_dataset(&subset, 2, PdeKind::Wave, Split::Test, dir.path(), 11).unwrap();

    let collect = |files: &[std::path::PathBuf]| -> Vec<DatasetRecord> {
        files
            .iter()
            .flat_map(|p| {
                std::fs::read_to_string(p)
                    .unwrap()
                    .lines()
                    .map(|l| serde_json::from_str(l).unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let train_recs = collect(&train.files);
    let test_recs = collect(&test.files);
    assert_eq!(train_recs.len(), test_recs.len());
    let train_nl: HashSet<&str> = train_recs.iter().map(|r| r.nl.as_str()).collect();
    for rec in &test_recs {
        assert!(!train_nl.contains(rec.nl.as_str()), "test sample leaked from train");
    }
}
