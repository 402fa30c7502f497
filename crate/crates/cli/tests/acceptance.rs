//! One pass/fail line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` cannot hold as stated; the test
//! requires them to keep failing so a change in behavior is noticed.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use gamma6::cxhyp::{sample_spinal_sphere, ProjPoint};
use gamma6::group::{
    beads, bead_tangencies, eval_str, fixed_point, gamma_prime_generators, orbit_bfs, Constants, FaceId, IsometryKind,
};
use gamma6::hlinalg::{herm, kernel, norm2, Mat3F, Vec3F};
use gamma6::limitset::{self, CloudGenerators, R0Basis};
use gamma6::linkcalc;
use gamma6::FieldElem;

/// Criterion 3 asks for the printed B1 column (-3,-3,1); that vector is off the conic.
const KNOWN_UNATTAINABLE: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gamma6() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gamma6"))
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let k = Constants::get();
    let id = Mat3F::identity();
    let inv = |m: &Mat3F| m.inv().unwrap();
    let (s, tm, a, b, u, v) = (&k.s, &k.t, &k.a, &k.b, &k.u, &k.v);
    let (si, ti, ai, bi) = (inv(s), inv(tm), inv(a), inv(b));
    let checks = [
        ("S^3", s.pow(3).unwrap() == id),
        ("T^3", tm.pow(3).unwrap() == id),
        ("(S^-1T)^6", u.pow(6).unwrap().is_scalar()),
        ("[A,B] = V^3", &(&(a * b) * &ai) * &bi == v.pow(3).unwrap()),
        ("SAS^-1", &(s * a) * &si == &bi * &ai),
        ("SBS^-1", &(s * b) * &si == *a),
        ("TAT^-1", &(tm * a) * &ti == *b),
        ("TBT^-1", &(tm * b) * &ti == &ai * &bi),
        ("A^-1UA", &(&ai * u) * a == &(&inv(u) * v) * u),
        (
            "AU^-2p_B ~ Up_B",
            a.apply(&u.pow(-2).unwrap().apply(&k.p_b)).is_proportional(&u.apply(&k.p_b)),
        ),
    ];
    let report = limitset::verify_all(k);
    let secs = t.elapsed().as_secs_f64();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty() && report.all_pass() && secs < 1.0,
        format!("{} listed identities, {} report checks, failed {:?}, {secs:.3} s", checks.len(), report.checks.len(), failed),
    )
}

fn criterion_2() -> Outcome {
    let k = Constants::get();
    let b = R0Basis::new();
    let (q1, q2, q3) = (b.q(0), b.q(1), b.q(2));
    let vals = [
        (herm(q1, q2), -16),
        (herm(q1, q3), -16),
        (herm(q2, q3), -64),
        (norm2(&k.p_u), -8),
        (norm2(&k.p_v), -8),
    ];
    let ok = vals.iter().all(|(x, want)| *x == FieldElem::from(*want));
    outcome(ok, format!("{:?}", vals.iter().map(|(x, _)| x.to_string()).collect::<Vec<_>>()))
}

fn criterion_3() -> Outcome {
    let k = Constants::get();
    let basis = R0Basis::new();
    let mb = limitset::stability_matrix(&basis, &k.b).unwrap();
    let mb1 = limitset::stability_matrix(&basis, &k.b1).unwrap();
    let col = |m: &Mat3F, j: usize, v: [i64; 3]| m.column(j) == Vec3F::from_ints(v[0], v[1], v[2]);
    let b_ok = col(&mb, 1, [24, 3, -2]) && col(&mb, 2, [8, 2, -1]) && col(&mb, 0, [1, 0, 0]);
    let b1_printed = col(&mb1, 1, [-3, -3, 1]);
    let b1_rest = col(&mb1, 0, [0, 1, 0]) && col(&mb1, 2, [1, 0, 0]);
    let gram = basis.gram();
    let preserve = [&mb, &mb1]
        .iter()
        .all(|m| limitset::gram_scale(&gram, m).is_some_and(|l| l.is_rational()));
    let c = mb1.column(1);
    outcome(
        b_ok && b1_printed && b1_rest && preserve,
        format!(
            "B columns match: {b_ok}; B1 columns 1,3 match: {b1_rest}; Gram preserved: {preserve}; \
             B1 column 2 is ({}, {}, {}), printed (-3, -3, 1) is not null on the conic",
            c[0], c[1], c[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let x = limitset::decompose_pv().unwrap();
    let want = [
        FieldElem::from_frac(-7, 4).unwrap(),
        FieldElem::from_frac(-3, 8).unwrap(),
        FieldElem::from_frac(1, 8).unwrap(),
    ];
    outcome(x == want, format!("({}, {}, {})", x[0], x[1], x[2]))
}

fn criterion_5() -> Outcome {
    let k = Constants::get();
    let fixed = |m: &Mat3F| kernel(&(m - &Mat3F::identity()));
    let ka = fixed(&k.a);
    let kb = fixed(&k.b);
    let a_ok = ka.len() == 1 && ka[0].is_proportional(&Vec3F::e(0));
    let b_ok = kb.len() == 1 && kb[0].is_proportional(&Vec3F::e(2));
    let v = fixed_point(&eval_str("V")).unwrap();
    let v_ok = matches!(v.kind, IsometryKind::Elliptic { .. })
        && v.points.len() == 1
        && v.points[0].lift().is_proportional(&k.p_v);
    outcome(a_ok && b_ok && v_ok, format!("A: {a_ok}, B: {b_ok}, V elliptic at [p_V]: {v_ok}"))
}

fn min_dist(a: &[[f64; 4]], b: &[[f64; 4]]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        for q in b {
            best = best.min((0..4).map(|i| (p[i] - q[i]) * (p[i] - q[i])).sum::<f64>());
        }
    }
    best.sqrt()
}

fn criterion_6() -> Outcome {
    let k = Constants::get();
    let mut incid = true;
    for (_, pt, f1, f2) in bead_tangencies(k) {
        let p = ProjPoint::new(pt).unwrap();
        incid &= k.face(f1).contains(&p) && k.face(f2).contains(&p);
    }
    let sample = |f: FaceId| sample_spinal_sphere(&k.face(f), 12_000);
    let [j0m, j1p, j3m, j2p] = beads().map(sample);
    let count = [&j0m, &j1p, &j3m, &j2p].iter().map(|s| s.len()).min().unwrap();
    let d1 = min_dist(&j0m, &j3m);
    let d2 = min_dist(&j1p, &j2p);
    // Adjacent beads touch, so their sampled distance should be small by comparison.
    let adjacent = min_dist(&j0m, &j1p);
    outcome(
        incid && count >= 10_000 && d1 > 1e-3 && d2 > 1e-3,
        format!(
            "tangency incidences exact: {incid}; fewest samples {count}; S^3 distance J0-/J3- {d1:.4}, J-1+/J2+ {d2:.4} (adjacent J0-/J-1+ {adjacent:.2e})"
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let free = orbit_bfs(&gamma_prime_generators(), 6);
    let ab = orbit_bfs(&[eval_str("A"), eval_str("B")], 6);
    let secs = t.elapsed().as_secs_f64();
    let bound = |n: u32| 2 * 3usize.pow(n) - 1;
    let free_counts: Vec<usize> = (1..=6).map(|n| free.count_up_to(n)).collect();
    let ab_counts: Vec<usize> = (1..=6).map(|n| ab.count_up_to(n)).collect();
    let exact = (1..=6).all(|n| free_counts[n as usize - 1] == bound(n));
    let smaller = (1..=6).any(|n| ab_counts[n as usize - 1] < bound(n));
    outcome(
        exact && smaller && secs < 30.0,
        format!("Gamma' {free_counts:?}, <A,B> {ab_counts:?}, {secs:.2} s"),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut pairs = linkcalc::verify_hopf_triple(2048).unwrap();
    pairs.extend(linkcalc::verify_v_axes(2048).unwrap());
    let secs = t.elapsed().as_secs_f64();
    let ok = pairs.len() == 5
        && pairs
            .iter()
            .all(|p| p.integer.abs() == 1 && p.residual < 0.1 && p.samples_used <= 1 << 14);
    let summary: Vec<String> = pairs
        .iter()
        .map(|p| format!("{} {} (res {:.1e}, n {})", p.pair, p.integer, p.residual, p.samples_used))
        .collect();
    outcome(ok && secs < 60.0, format!("{}; {secs:.2} s", summary.join(", ")))
}

fn criterion_9() -> Outcome {
    let l = limitset::lemniscate(4096).unwrap();
    let d = &l.double_point;
    let c = &l.certificate;
    let ok = l.is_closed(1e-12) && d.gap < 1e-6 && d.separation > 0.1 && c.two_real_points && c.common_ccircle;
    outcome(
        ok,
        format!(
            "closed; refined gap {:.1e} (nearest raw samples {:.1e}), separation {:.3}, z0 = {}, common C-circle {}",
            d.gap, d.sample_gap, d.separation, c.z0, c.common_ccircle
        ),
    )
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("gamma6-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |threads: Option<&str>, name: &str| {
        let path = dir.join(name);
        let mut cmd = gamma6();
        cmd.args(["cloud", "--depth", "4", "--samples", "256", "--seed", "7", "--out"]).arg(&path);
        if let Some(t) = threads {
            cmd.args(["--threads", t]);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read(&path).unwrap()
    };
    let base = run(None, "a.csv");
    let same = [run(None, "b.csv"), run(Some("1"), "t1.csv"), run(Some("2"), "t2.csv"), run(Some("8"), "t8.csv")]
        .iter()
        .all(|o| *o == base);
    let exact = limitset::cloud_exact(4, 256, CloudGenerators::AB).unwrap();
    let null = exact.iter().all(|(_, l)| norm2(l).is_zero());
    let _ = std::fs::remove_dir_all(&dir);
    outcome(same && null, format!("{} bytes identical over 2 runs and threads 1/2/8: {same}; {} exact lifts null: {null}", base.len(), exact.len()))
}

fn criterion_11() -> Outcome {
    let out = gamma6()
        .args(["chain", "--random", "20", "--max-len", "6", "--seed", "11"])
        .output()
        .unwrap();
    let reports: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let links: usize = reports.iter().map(|r| r["links"].as_array().unwrap().len()).sum();
    let all = reports.iter().all(|r| {
        r["links"]
            .as_array()
            .unwrap()
            .iter()
            .all(|l| l["on_previous"] == true && l["on_next"] == true)
    });
    let max_len = reports.iter().map(|r| r["word"].as_str().unwrap().len()).max().unwrap_or(0);
    outcome(
        out.status.success() && reports.len() == 20 && all && max_len <= 6,
        format!("{} words, {links} links, all exactly certified: {all}", reports.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut results = BTreeMap::new();
    for (n, f) in criteria {
        let o = f();
        println!("criterion {n:>2}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.insert(n, o.pass);
    }
    for (n, pass) in results {
        if KNOWN_UNATTAINABLE.contains(&n) {
            assert!(!pass, "criterion {n} was expected to fail as stated");
        } else {
            assert!(pass, "criterion {n} failed");
        }
    }
}
