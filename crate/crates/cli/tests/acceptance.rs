//! Acceptance checks. Prints one PASS/FAIL line per criterion and fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use eurbound::bounds::{q_c_best, q_fsd_best, q_mu, PairDistributions};
use eurbound::hubbard::{self, LatticeModel};
use eurbound::measurement::overlap_matrix;
use eurbound::spin1::evaluate::{
    bare_fourier_pair, evaluate_pair, ground_state_table, linear_grid, optimal_phases, squeezed_split_state,
};
use eurbound::spin1::{fidelity, squeezed_reference, SpinRotation, SqueezingEvolution};
use eurbound::verify::random::{rng_for, sample_basis, sample_bipartite, sample_unitary};
use eurbound::verify::{audit_relation, conserved_distribution_gap, random_blocked_state, AuditRelation, SLACK_TOL};
use eurbound::Measurement;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn relation_validity() -> Outcome {
    let start = Instant::now();
    let relations = [
        AuditRelation::MaassenUffink,
        AuditRelation::Berta,
        AuditRelation::FrankLieb,
        AuditRelation::FullyStateDependent,
        AuditRelation::Tripartite,
        AuditRelation::FullyStateDependentPovm,
        AuditRelation::Witness,
        AuditRelation::Conserved,
    ];
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for r in relations {
        for d in [2, 3] {
            let rep = audit_relation(r, [d, d], 1000, 20_240_601).map_err(|e| e.to_string())?;
            worst = worst.min(rep.min_slack);
            if rep.violations > 0 || rep.min_slack < -SLACK_TOL {
                failures.push(format!("{r} d={d}: min slack {:e} at seed {}", rep.min_slack, rep.argmin_seed));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(300);
    check(ok, format!("16 audits x 1000 trials, worst slack {worst:.3e}, {elapsed:.1?} {}", failures.join("; ")))
}

fn mub_collapse() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2usize, 3, 5] {
        let x = Measurement::computational(d);
        let z = Measurement::fourier(d);
        let c = overlap_matrix(&x, &z).map_err(|e| e.to_string())?;
        let target = (d as f64).log2();
        for seed in 0..5 {
            let mut rng = rng_for(seed);
            let rho = sample_bipartite(d, d, &mut rng).map_err(|e| e.to_string())?;
            let (xb, zb) = (sample_basis(d, &mut rng), sample_basis(d, &mut rng));
            let p = PairDistributions::measure(&rho, &x, &z, &xb, &zb).map_err(|e| e.to_string())?;
            let (qc, _) = q_c_best(&c, &p.xx.marginal_x(), &p.zz.marginal_x()).map_err(|e| e.to_string())?;
            let (qf, _) = q_fsd_best(&c, &p).map_err(|e| e.to_string())?;
            for q in [q_mu(&c), qc, qf] {
                worst = worst.max((q - target).abs());
            }
        }
    }
    check(worst <= 1e-10, format!("max |q - log2 d| = {worst:.2e} over d in {{2,3,5}}"))
}

fn schmidt_identity() -> Outcome {
    let rep = audit_relation(AuditRelation::Schmidt, [3, 3], 200, 99).map_err(|e| e.to_string())?;
    check(rep.violations == 0 && -rep.min_slack <= 1e-9, format!("max residual {:.2e} over 200 states", -rep.min_slack))
}

fn hubbard_two_sites() -> Outcome {
    let gs = hubbard::ground_state(&LatticeModel::new(2, 1.0, -100.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let t = hubbard::optimal_time(2);
    let p = hubbard::evaluate(&gs, t).map_err(|e| e.to_string())?;
    let exact = p.exact();
    let ok = p.mu.bound >= 0.95
        && p.fsd.bound >= 0.95
        && (exact - p.mu.bound).abs() <= 0.05
        && (exact - p.fsd.bound).abs() <= 0.05;
    check(ok, format!("t = {t:.6}, bound_mu = {:.6}, bound_fsd = {:.6}, exact = {exact:.6}", p.mu.bound, p.fsd.bound))
}

fn hubbard_large() -> Outcome {
    let start = Instant::now();
    let points = hubbard::sweep(&[30], 60, 1.0, -100.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let min_fsd = points.iter().map(|p| p.fsd.bound).fold(f64::INFINITY, f64::min);
    let max_fsd = points.iter().map(|p| p.fsd.bound).fold(f64::NEG_INFINITY, f64::max);
    let max_mu = points.iter().map(|p| p.mu.bound).fold(f64::NEG_INFINITY, f64::max);
    let ok = points.len() == 60
        && min_fsd > 0.0
        && max_mu <= 0.0
        && (1.2..=1.8).contains(&max_fsd)
        && elapsed < Duration::from_secs(120);
    check(
        ok,
        format!("min bound_fsd {min_fsd:.4}, max bound_fsd {max_fsd:.4}, max bound_mu {max_mu:.4}, {elapsed:.1?}"),
    )
}

fn spin_structural_zeros() -> Outcome {
    let n = 15;
    let ev = SqueezingEvolution::new(n, 1.0).map_err(|e| e.to_string())?;
    let squeezed = squeezed_split_state(&ev, 0.7).map_err(|e| e.to_string())?;
    let mut rng = rng_for(5);
    let mut all_zero = true;
    for _ in 0..5 {
        let x = SpinRotation::new(sample_unitary(3, &mut rng), n).map_err(|e| e.to_string())?;
        let z = SpinRotation::new(sample_unitary(3, &mut rng), n).map_err(|e| e.to_string())?;
        let b = evaluate_pair(&squeezed, &x, &z).map_err(|e| e.to_string())?;
        all_zero &= b.mu.q == 0.0;
    }
    let (x, z) = bare_fourier_pair(n).map_err(|e| e.to_string())?;
    let polar = squeezed_split_state(&ev, 0.0).map_err(|e| e.to_string())?;
    let b = evaluate_pair(&polar, &x, &z).map_err(|e| e.to_string())?;
    all_zero &= b.mu.q == 0.0;
    let conf = polar.configurational();
    let ok = all_zero && conf.abs() <= 1e-10 && (-1e-9..=1e-6).contains(&b.fsd.bound);
    check(ok, format!("q_mu all zero: {all_zero}, configurational(r=0) = {conf:.2e}, bound_fsd(r=0) = {:.2e}", b.fsd.bound))
}

fn decomposition_identity() -> Outcome {
    let ev = SqueezingEvolution::new(15, 1.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in linear_grid(0.0, 2.5, 20) {
        let s = squeezed_split_state(&ev, r).map_err(|e| e.to_string())?;
        worst = worst.max((s.number_entropy() + s.configurational() - s.entanglement()).abs());
    }
    check(worst <= 1e-9, format!("max |H(p) + configurational - (-H(A|B))| = {worst:.2e} over 20 states"))
}

fn squeezed_cross_check() -> Outcome {
    let ev = SqueezingEvolution::new(15, 1.0).map_err(|e| e.to_string())?;
    let f = fidelity(&squeezed_reference(15, 0.2), &ev.pair_amplitudes(0.2));
    check(f > 0.99, format!("overlap {f:.6}"))
}

fn spin_detection() -> Outcome {
    let n = 15;
    let opt = optimal_phases(n, 0.5, 16, 1).map_err(|e| e.to_string())?;
    let ev = SqueezingEvolution::new(n, 1.0).map_err(|e| e.to_string())?;
    let (x, z) = bare_fourier_pair(n).map_err(|e| e.to_string())?;
    let late = evaluate_pair(&squeezed_split_state(&ev, 2.5).map_err(|e| e.to_string())?, &x, &z)
        .map_err(|e| e.to_string())?;
    let early = evaluate_pair(&squeezed_split_state(&ev, 0.0).map_err(|e| e.to_string())?, &x, &z)
        .map_err(|e| e.to_string())?;
    let grid = linear_grid(-2.0, 2.0, 41);
    let table = ground_state_table(n, -1.0, &grid).map_err(|e| e.to_string())?;
    let q = table.column("q_over_qc").ok_or("missing q column")?;
    let fsd = table.column("bound_fsd").ok_or("missing fsd column")?;
    let k = q.iter().position(|&v| (v - 1.0).abs() < 1e-9).ok_or("q_c not on grid")?;
    let (below, at, above) = (fsd[k - 1], fsd[k], fsd[k + 1]);
    // the bound grows as q is lowered through q_c
    let monotone = below > at && at > above;
    let ok = opt.bounds.fsd.bound > 0.0
        && late.fsd.bound > 0.0
        && early.pn.bound <= 0.0
        && early.c.bound <= 0.0
        && monotone;
    check(
        ok,
        format!(
            "optimized r=0.5: {:.4}; bare r=2.5: {:.4}; r=0 pn {:.3} c {:.3}; fsd at q/q_c 0.9,1.0,1.1: {below:.4}, {at:.4}, {above:.4}",
            opt.bounds.fsd.bound, late.fsd.bound, early.pn.bound, early.c.bound
        ),
    )
}

fn conserved_consistency() -> Outcome {
    let state = random_blocked_state(8, 31).map_err(|e| e.to_string())?;
    let gap = conserved_distribution_gap(&state, 50, 77).map_err(|e| e.to_string())?;
    check(gap <= 1e-12, format!("max distribution difference {gap:.2e} over 50 rotation pairs"))
}

fn csv_body(out: &[u8]) -> String {
    String::from_utf8_lossy(out).lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_eurbound");
    let dir = std::env::temp_dir().join(format!("eurbound-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let bell = dir.join("bell.txt");
    std::fs::write(&bell, "dims 2 2\n0.7071067811865476 0\n0 0\n0 0\n0.7071067811865476 0\n").map_err(|e| e.to_string())?;
    let bell = bell.to_string_lossy().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["fig1", "--lmax", "8"],
        vec!["fig2", "--sizes", "2,5", "--points", "10"],
        vec!["fig3", "--l", "10"],
        vec!["fig4", "--sizes", "2,6", "--points", "10"],
        vec!["fig5", "--sizes", "2,6", "--points", "10"],
        vec!["fig6", "--sizes", "6", "--points", "5", "--opt-n", "6", "--restarts", "4", "--seed", "3"],
        vec!["fig7", "--sizes", "6", "--points", "5"],
        vec!["fig8", "--n", "10", "--points", "9"],
        vec!["audit", "--relation", "all", "--dims", "2x2", "--trials", "200", "--seed", "7"],
        vec!["optimize", "--n", "6", "--restarts", "4", "--seed", "5"],
        vec!["bound", bell.as_str()],
    ];
    let mut mismatched = Vec::new();
    for args in &runs {
        let mut bodies = Vec::new();
        for threads in ["1", "8", "1"] {
            let out = Command::new(bin).args(args).args(["--threads", threads]).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)));
            }
            bodies.push(csv_body(&out.stdout));
        }
        if bodies.iter().any(|b| b != &bodies[0] || b.is_empty()) {
            mismatched.push(args[0]);
        }
    }
    let _ = std::fs::remove_dir_all(Path::new(&dir));
    check(mismatched.is_empty(), format!("{} commands at 1 and 8 threads, mismatched: {mismatched:?}", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("relation validity", relation_validity),
        ("MUB collapse", mub_collapse),
        ("Schmidt-basis identity", schmidt_identity),
        ("Hubbard L = 2 tight case", hubbard_two_sites),
        ("Hubbard large-L qualitative", hubbard_large),
        ("spin-1 structural zeros", spin_structural_zeros),
        ("decomposition identity", decomposition_identity),
        ("squeezed-state cross-check", squeezed_cross_check),
        ("spin-1 detection", spin_detection),
        ("conserved-quantity consistency", conserved_consistency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} ({name}): {detail} [{:.1?}]", i + 1, start.elapsed());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
