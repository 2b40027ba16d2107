use std::fs;
use std::io::Write;
use std::path::Path;

use eurbound::bounds::{evaluate_bases, evaluate_povms, BoundReport};
use eurbound::hubbard;
use eurbound::measurement::hadamard;
use eurbound::qmath::fourier_matrix;
use eurbound::spin1::evaluate::{
    critical_q, ground_state_table, linear_grid, optimal_phases, optimize_phases, squeezed_split_state,
    squeezing_table, PhaseObjective,
};
use eurbound::spin1::SqueezingEvolution;
use eurbound::verify::{audit_relation, AuditRelation};
use eurbound::{CMatrix, Measurement, Table};

use crate::state_file::parse_state;
use crate::{AuditArgs, BoundArgs, Cli, CliError, Command, Objective, SqueezeArgs};

const MAX_LATTICE: usize = 60;
const MAX_PARTICLES: usize = 80;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn require(ok: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(config(msg))
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    require(v.is_finite(), format!("{name} must be finite, got {v}"))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    validate(cli)?;
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;

    let (table, extra) = execute(cli)?;
    let metadata = format!("eurbound {:?} seed={} threads={threads}{extra}", cli.command, cli.seed);
    emit(cli.output.as_deref(), &table.to_csv(&metadata))
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        require(t >= 1, "threads must be at least 1")?;
    }
    let lattice = |sizes: &[usize]| -> Result<(), CliError> {
        require(!sizes.is_empty(), "at least one lattice size")?;
        require(
            sizes.iter().all(|&l| (2..=MAX_LATTICE).contains(&l)),
            format!("lattice sizes must lie in 2..={MAX_LATTICE}"),
        )
    };
    match &cli.command {
        Command::Fig1(a) => {
            require(a.lmin >= 2 && a.lmin <= a.lmax && a.lmax <= MAX_LATTICE, "need 2 <= lmin <= lmax <= 60")?;
            finite("u", a.u)?;
            require(a.j > 0.0 && a.j.is_finite(), "j must be positive")?;
        }
        Command::Fig2(a) => {
            lattice(&a.sizes)?;
            require(a.points >= 1, "points must be at least 1")?;
        }
        Command::Fig3(a) => {
            lattice(&[a.l])?;
            require(a.bins >= 1, "bins must be at least 1")?;
            if let Some(t) = a.t {
                require(t.is_finite() && t > 0.0, "t must be positive")?;
            }
        }
        Command::Fig4(a) | Command::Fig5(a) => {
            lattice(&a.sizes)?;
            require(a.points >= 1, "points must be at least 1")?;
            finite("u", a.u)?;
            require(a.j > 0.0 && a.j.is_finite(), "j must be positive")?;
        }
        Command::Fig6(a) | Command::Fig7(a) => validate_squeeze(a)?,
        Command::Fig8(a) => {
            require((1..=MAX_PARTICLES).contains(&a.n), format!("n must lie in 1..={MAX_PARTICLES}"))?;
            require(a.g < 0.0 && a.g.is_finite(), "g must be negative")?;
            require(a.points >= 1, "points must be at least 1")?;
            finite("qmin", a.qmin)?;
            finite("qmax", a.qmax)?;
            require(a.qmin <= a.qmax, "qmin must not exceed qmax")?;
        }
        Command::Audit(a) => {
            parse_relations(&a.relation)?;
            parse_dims(&a.dims)?;
            require(a.trials >= 1, "trials must be at least 1")?;
        }
        Command::Optimize(a) => {
            require((1..=MAX_PARTICLES).contains(&a.n), format!("n must lie in 1..={MAX_PARTICLES}"))?;
            require(a.r.is_finite() && a.r >= 0.0, "r must be nonnegative")?;
            require(a.restarts >= 1, "restarts must be at least 1")?;
        }
        Command::Bound(a) => {
            for name in [Some(&a.x), Some(&a.z), a.xb.as_ref(), a.zb.as_ref()].into_iter().flatten() {
                require(["computational", "fourier", "hadamard"].contains(&name.as_str()), format!("unknown basis {name:?}"))?;
            }
        }
    }
    Ok(())
}

fn validate_squeeze(a: &SqueezeArgs) -> Result<(), CliError> {
    require(!a.sizes.is_empty(), "at least one particle number")?;
    require(
        a.sizes.iter().chain([&a.opt_n]).all(|&n| (1..=MAX_PARTICLES).contains(&n)),
        format!("particle numbers must lie in 1..={MAX_PARTICLES}"),
    )?;
    require(a.points >= 1, "points must be at least 1")?;
    require(a.rmax.is_finite() && a.rmax >= 0.0, "rmax must be nonnegative")?;
    require(a.opt_r.is_finite() && a.opt_r >= 0.0, "opt-r must be nonnegative")?;
    require(a.restarts >= 1, "restarts must be at least 1")?;
    if let Some(p) = &a.phases {
        require(p.len() == 3 && p.iter().all(|v| v.is_finite()), "phases need three finite values")?;
    }
    Ok(())
}

fn parse_relations(s: &str) -> Result<Vec<AuditRelation>, CliError> {
    if s == "all" {
        return Ok(AuditRelation::ALL.to_vec());
    }
    s.split(',').map(|r| r.trim().parse::<AuditRelation>().map_err(|e| config(e.to_string()))).collect()
}

fn parse_dims(s: &str) -> Result<[usize; 2], CliError> {
    let bad = || config(format!("dims must look like 3x3, got {s:?}"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let da: usize = a.trim().parse().map_err(|_| bad())?;
    let db: usize = b.trim().parse().map_err(|_| bad())?;
    require((1..=4).contains(&da) && (1..=4).contains(&db), "audit dims must lie in 1..=4")?;
    Ok([da, db])
}

fn named_basis(name: &str, d: usize) -> Result<CMatrix, CliError> {
    match name {
        "computational" => Ok(CMatrix::identity(d, d)),
        "fourier" => Ok(fourier_matrix(d)),
        "hadamard" if d == 2 => Ok(hadamard()),
        "hadamard" => Err(config(format!("hadamard basis needs dimension 2, state has {d}"))),
        _ => Err(config(format!("unknown basis {name:?}"))),
    }
}

fn execute(cli: &Cli) -> Result<(Table, String), CliError> {
    let none = String::new();
    Ok(match &cli.command {
        Command::Fig1(a) => {
            let sizes: Vec<usize> = (a.lmin..=a.lmax).collect();
            (hubbard::fig1(&sizes, a.j, a.u)?, none)
        }
        Command::Fig2(a) => (hubbard::fig2(&a.sizes, a.points)?, none),
        Command::Fig3(a) => {
            let t = a.t.unwrap_or_else(|| hubbard::optimal_time(a.l));
            (hubbard::fig3(a.l, t, a.bins)?, format!(" t={t:.17e}"))
        }
        Command::Fig4(a) | Command::Fig5(a) => {
            (hubbard::sweep_table(&hubbard::sweep(&a.sizes, a.points, a.j, a.u)?)?, none)
        }
        Command::Fig6(a) => {
            let phases = match &a.phases {
                Some(p) => [p[0], p[1], p[2]],
                None => optimal_phases(a.opt_n, a.opt_r, a.restarts, cli.seed)?.phases,
            };
            let rs = linear_grid(0.0, a.rmax, a.points);
            (squeezing_table(&a.sizes, &rs, phases)?, format!(" phases={phases:?}"))
        }
        Command::Fig7(a) => {
            let rs = linear_grid(0.0, a.rmax, a.points);
            (squeezing_table(&a.sizes, &rs, [0.0; 3])?, none)
        }
        Command::Fig8(a) => {
            let grid = linear_grid(a.qmin, a.qmax, a.points);
            (ground_state_table(a.n, a.g, &grid)?, format!(" q_c={:.17e}", critical_q(a.n, a.g)))
        }
        Command::Audit(a) => (audit_table(a, cli.seed)?, none),
        Command::Optimize(a) => {
            let ev = SqueezingEvolution::new(a.n, 1.0)?;
            let state = squeezed_split_state(&ev, a.r)?;
            let objective = match a.objective {
                Objective::Fsd => PhaseObjective::FsdBound,
                Objective::EntropySum => PhaseObjective::EntropySum,
            };
            let o = optimize_phases(&state, objective, a.restarts, cli.seed)?;
            let mut t = Table::new([
                "N", "r", "phase_1", "phase_0", "phase_m1", "objective", "bound_fsd", "bound_c", "bound_pn",
                "neg_HAB_exact", "restart", "converged",
            ]);
            t.push(vec![
                a.n.into(),
                a.r.into(),
                o.phases[0].into(),
                o.phases[1].into(),
                o.phases[2].into(),
                o.value.into(),
                o.bounds.fsd.bound.into(),
                o.bounds.c.bound.into(),
                o.bounds.pn.bound.into(),
                o.bounds.exact.into(),
                o.restart.into(),
                i64::from(o.converged).into(),
            ])?;
            (t, none)
        }
        Command::Bound(a) => bound_table(a)?,
    })
}

fn audit_table(a: &AuditArgs, seed: u64) -> Result<Table, CliError> {
    let dims = parse_dims(&a.dims)?;
    let mut t = Table::new(["relation", "d_A", "d_B", "trials", "min_slack", "argmin_seed", "violations"]);
    for r in parse_relations(&a.relation)? {
        if r.needs_equal_dims() && dims[0] != dims[1] {
            if a.relation == "all" {
                continue;
            }
            return Err(config(format!("{r} needs equal dims")));
        }
        let rep = audit_relation(r, dims, a.trials, seed)?;
        t.push(vec![
            r.name().into(),
            dims[0].into(),
            dims[1].into(),
            rep.trials.into(),
            rep.min_slack.into(),
            (rep.argmin_seed as i64).into(),
            rep.violations.into(),
        ])?;
    }
    Ok(t)
}

fn bound_table(a: &BoundArgs) -> Result<(Table, String), CliError> {
    let text = fs::read_to_string(&a.state).map_err(|e| config(format!("cannot read {}: {e}", a.state.display())))?;
    let state = parse_state(&text)?;
    let [da, db] = state.dims();
    let rho = state.density();
    let xa = named_basis(&a.x, da)?;
    let za = named_basis(&a.z, da)?;
    let side_b = |name: &Option<String>, fallback: &str| -> Result<CMatrix, CliError> {
        match name {
            Some(n) => named_basis(n, db),
            None => Ok(named_basis(fallback, db)?.conjugate()),
        }
    };
    let xb = side_b(&a.xb, &a.x)?;
    let zb = side_b(&a.zb, &a.z)?;
    let m = |u: CMatrix| Measurement::basis(u).map_err(CliError::from);
    let (xa, za, xb, zb) = (m(xa)?, m(za)?, m(xb)?, m(zb)?);

    let mut reports: Vec<BoundReport> = evaluate_bases(&rho, &xa, &za, &xb, &zb)?;
    reports.extend(evaluate_povms(&rho, &xa, &za, &xb, &zb)?);
    let mut t = Table::new(["relation", "orientation", "q", "H_X", "H_Z", "residual", "bound", "neg_HAB_exact", "certifies"]);
    for r in &reports {
        eprintln!(
            "{:>5}  q = {:.6}  bound = {:.6}  exact = {:.6}{}",
            r.kind.name(),
            r.q,
            r.bound,
            r.exact.unwrap_or(f64::NAN),
            if r.certifies() { "  certifies entanglement" } else { "" }
        );
        t.push(vec![
            r.kind.name().into(),
            r.orientation.map_or_else(|| "-".to_string(), |o| o.to_string()).into(),
            r.q.into(),
            r.h_x.into(),
            r.h_z.into(),
            r.residual.unwrap_or(0.0).into(),
            r.bound.into(),
            r.exact.unwrap_or(f64::NAN).into(),
            i64::from(r.certifies()).into(),
        ])?;
    }
    Ok((t, format!(" state={}", a.state.display())))
}

/// Writes through a sibling temporary file so a failed run leaves nothing behind.
fn emit(path: Option<&Path>, csv: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(csv.as_bytes()).map_err(|e| config(format!("stdout: {e}")));
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let result = fs::write(&tmp, csv).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(config(format!("cannot write {}: {e}", path.display())));
    }
    Ok(())
}
