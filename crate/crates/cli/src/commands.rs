//! Subcommand bodies. Each returns the fields of the final `RESULT` line
//! and an exit code; errors are mapped to exit codes in [`run`].

use crate::Common;
use fraktur_core::check::{derivative_checks, CheckKind};
use fraktur_core::io::{boundary_to_nodes, f, write_csv, write_vtk, VtkFields};
use fraktur_core::lower::{
    kkt_residual_lower, nodal_complementarity, pdas_forward_solve, suff1_counterexample, suff2_counterexample,
    ForwardSolution, Phase,
};
use fraktur_core::model::energy::step_energy;
use fraktur_core::scenario::ScenarioConfig;
use fraktur_core::upper::regularity_probe;
use fraktur_core::{Control, FractureProblem, FrakturError, Result};
use nalgebra::DVector;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INAPPLICABLE: u8 = 3;
pub const EXIT_LINE_SEARCH: u8 = 4;
pub const EXIT_NOT_REGULAR: u8 = 5;

/// Key-value pairs of the `RESULT` line and the exit code.
pub struct Outcome {
    pub fields: Vec<(String, String)>,
    pub code: u8,
}

impl Outcome {
    fn new(code: u8) -> Self {
        Self { fields: Vec::new(), code }
    }
    fn put(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.fields.push((k.to_string(), v.to_string()));
        self
    }
    fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.put(k, f(v))
    }
}

pub struct Ctx {
    pub cfg: ScenarioConfig,
    pub p: FractureProblem,
    pub out: PathBuf,
    pub seed: u64,
}

pub type Runner = fn(&Ctx) -> Result<Outcome>;

fn exit_code(e: &FrakturError) -> u8 {
    match e {
        FrakturError::Config(_) => EXIT_CONFIG,
        FrakturError::Inapplicable(_) => EXIT_INAPPLICABLE,
        FrakturError::LineSearch(_) => EXIT_LINE_SEARCH,
        _ => EXIT_FAIL,
    }
}

fn status(e: &FrakturError) -> &'static str {
    match e {
        FrakturError::Config(_) => "config_error",
        FrakturError::Inapplicable(_) => "inapplicable",
        FrakturError::Inconclusive(_) => "inconclusive",
        FrakturError::LineSearch(_) => "line_search_failed",
        FrakturError::SolverFailure { .. } | FrakturError::SingularSystem { .. } => "solver_failure",
        _ => "error",
    }
}

fn setup(args: &Common) -> Result<Ctx> {
    let cfg = ScenarioConfig::from_path(&args.config)?;
    let p = cfg.build_problem()?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    fs::create_dir_all(&out)?;
    let seed = args.seed.unwrap_or(cfg.output.seed);
    Ok(Ctx { cfg, p, out, seed })
}

pub fn run(name: &str, args: &Common, body: Runner) -> u8 {
    let result = setup(args).and_then(|ctx| body(&ctx));
    let (code, mut line) = match result {
        Ok(o) => {
            let st = if o.code == EXIT_OK { "ok" } else { "fail" };
            let mut line = format!("RESULT command={name} status={st} exit={}", o.code);
            for (k, v) in &o.fields {
                line.push_str(&format!(" {k}={v}"));
            }
            (o.code, line)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            (code, format!("RESULT command={name} status={} exit={code}", status(&e)))
        }
    };
    line.push('\n');
    print!("{line}");
    code
}

fn forward_solve(ctx: &Ctx) -> Result<(Control, DVector<f64>, ForwardSolution)> {
    let q = ctx.cfg.control(&ctx.p);
    let phi0 = ctx.cfg.initial_phi(&ctx.p);
    let sol = pdas_forward_solve(&ctx.p, &q, &phi0, &ctx.cfg.pdas_options())?;
    Ok((q, phi0, sol))
}

fn path(ctx: &Ctx, name: &str) -> PathBuf {
    ctx.out.join(name)
}

fn write_kv(p: &Path, rows: &[(&str, f64)]) -> Result<()> {
    write_csv(p, &["quantity", "value"], rows.iter().map(|(k, v)| vec![k.to_string(), f(*v)]))
}

pub fn forward(ctx: &Ctx) -> Result<Outcome> {
    let p = &ctx.p;
    fs::write(path(ctx, "mesh.txt"), p.mesh().dump())?;
    let (q, phi0, sol) = forward_solve(ctx)?;
    let state = &sol.state;
    let nm = p.time().n_steps();
    let mut rows = Vec::new();
    for m in 0..=nm {
        let e = step_energy(p, &state.u[m], &state.phi[m], &q.q[m]);
        let active = if m == 0 { 0 } else { (0..p.n_phi()).filter(|&i| sol.active.is_active(m, i)).count() };
        rows.push(vec![m.to_string(), f(p.time().t(m)), f(e), f(state.phi[m].min()), f(state.phi[m].max()), active.to_string()]);
        let l2 = if m == 0 { DVector::zeros(p.n_phi()) } else { sol.multiplier.l2[m - 1].clone() };
        let fields =
            VtkFields { scalars: vec![("phi", state.phi[m].clone()), ("l2", l2)], vectors: vec![("u", &state.u[m])] };
        write_vtk(&path(ctx, &format!("step_{m:03}.vtk")), p, &format!("fraktur forward step {m}"), &fields)?;
    }
    write_csv(&path(ctx, "forward.csv"), &["step", "t", "energy", "phi_min", "phi_max", "active"], rows)?;
    let log = sol.log.iter().map(|r| {
        let phase = match r.phase {
            Phase::Step(m) => format!("step{m}"),
            Phase::SpaceTime => "spacetime".to_string(),
        };
        vec![phase, r.iter.to_string(), r.active.to_string(), f(r.energy), f(r.r_u), f(r.r_comp), f(r.shift), f(r.step_length)]
    });
    write_csv(
        &path(ctx, "iterations.csv"),
        &["phase", "iter", "active", "energy", "r_u", "r_comp", "shift", "step_length"],
        log,
    )?;
    let r = kkt_residual_lower(p, state, &q, &sol.multiplier, &phi0)?;
    let ncp = nodal_complementarity(state, &sol.multiplier);
    write_kv(
        &path(ctx, "kkt.csv"),
        &[
            ("r_feas_init", r.r_feas_init),
            ("r_feas_irr", r.r_feas_irr),
            ("r_dual", r.r_dual),
            ("r_stat", r.r_stat),
            ("r_comp", r.r_comp),
            ("nodal_complementarity", ncp),
        ],
    )?;
    println!("kkt residuals: {r:?}");
    println!("nodal complementarity: {ncp:e}");
    let tol = ctx.cfg.solver.kkt_tol;
    let ok = r.max() <= tol;
    let mut o = Outcome::new(if ok { EXIT_OK } else { EXIT_FAIL });
    o.num("kkt_max", r.max()).num("ncp", ncp).num("phi_min", state.phi[nm].min()).put("active", sol.active.count());
    Ok(o)
}

pub fn check(ctx: &Ctx) -> Result<Outcome> {
    let rep = derivative_checks(&ctx.p, ctx.cfg.check.points, ctx.seed)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for c in &rep.checks {
        for r in &c.sweep.rows {
            rows.push(vec![c.kind.name().to_string(), c.point.to_string(), f(r.h), f(r.error)]);
        }
        summary.push(vec![c.kind.name().to_string(), c.point.to_string(), f(c.sweep.order), c.sweep.exact.to_string()]);
    }
    write_csv(&path(ctx, "check.csv"), &["check", "point", "h", "error"], rows)?;
    write_csv(&path(ctx, "check_orders.csv"), &["check", "point", "order", "exact"], summary)?;
    let e = rep.estimates;
    write_kv(
        &path(ctx, "norm_estimates.csv"),
        &[("max_part_over_norm", e.worst_ratio), ("elastic_ratio", e.elastic_ratio), ("linf_ratio", e.linf_ratio)],
    )?;
    let mut o = Outcome::new(if rep.passes(1.9) { EXIT_OK } else { EXIT_FAIL });
    for k in [CheckKind::Gradient, CheckKind::Hessian, CheckKind::APrime] {
        println!("{:>9}: min observed order {}", k.name(), rep.min_order(k));
        o.num(&format!("{}_order", k.name()), rep.min_order(k));
    }
    println!("norm estimate max{{|grad phi|, |phi|}}/|u|_Y = {}", e.worst_ratio);
    o.num("estimate_ratio", e.worst_ratio).put("points", ctx.cfg.check.points);
    Ok(o)
}

pub fn counterexamples(ctx: &Ctx) -> Result<Outcome> {
    let p = &ctx.p;
    let (q, phi0, sol) = forward_solve(ctx)?;
    let s1 = suff1_counterexample(p, &sol.state, &q, &sol.multiplier, &phi0)?;
    let tol = ctx.cfg.solver.kkt_tol;
    let refutes = s1.refutes(tol);
    write_csv(
        &path(ctx, "suff1.csv"),
        &["f_prime", "pairing", "norm_y", "refutes"],
        [vec![f(s1.f_prime), f(s1.pairing), f(s1.norm_y), refutes.to_string()]],
    )?;
    let table = suff2_counterexample(p, &sol.state, &sol.multiplier, None)?;
    let rows = table.rows.iter().map(|r| vec![r.eta.to_string(), f(r.norm_sq), f(r.form), f(r.ratio), f(r.scaled_norm), f(r.pairing)]);
    write_csv(&path(ctx, "suff2.csv"), &["eta", "norm_sq", "form", "ratio", "norm_sq_times_eta_over_c", "pairing"], rows)?;
    println!("first order: f'(u)(Phi) = {:e}, |Phi|_Y = {:e}", s1.f_prime, s1.norm_y);
    for r in &table.rows {
        println!("eta {:>3}: |Phi|^2 = {:.6e}  form = {:.6e}  ratio = {:.6e}", r.eta, r.norm_sq, r.form, r.ratio);
    }
    let decreasing = table.decreasing();
    let mut o = Outcome::new(if refutes && decreasing { EXIT_OK } else { EXIT_FAIL });
    o.num("f_prime", s1.f_prime).num("norm_y", s1.norm_y).put("ratio_decreasing", decreasing).put("rows", table.rows.len());
    Ok(o)
}

pub fn control(ctx: &Ctx) -> Result<Outcome> {
    use fraktur_core::upper::solve_control;
    let p = &ctx.p;
    let Some((spec, q_dagger, q_init)) = ctx.cfg.control_problem(p)? else {
        return Err(FrakturError::Config("field `control`: section required for the control command".into()));
    };
    let opts = ctx.cfg.control_options().expect("control section present");
    let phi0 = ctx.cfg.initial_phi(p);
    let sol = solve_control(p, &spec, &phi0, &q_init, &opts)?;
    let hist = sol.history.iter().map(|h| {
        vec![h.iter.to_string(), f(h.cost), f(h.grad_norm), f(h.step_length), if h.comp_held { "held" } else { "violated" }.to_string()]
    });
    write_csv(&path(ctx, "history.csv"), &["iter", "cost", "grad_norm", "step_length", "complementarity"], hist)?;
    let nm = p.time().n_steps();
    let mut qrows = Vec::new();
    for m in 0..=nm {
        for (k, &node) in p.neumann().nodes.iter().enumerate() {
            qrows.push(vec![m.to_string(), node.to_string(), f(sol.control.q[m][k]), f(q_dagger.q[m][k])]);
        }
    }
    write_csv(&path(ctx, "control.csv"), &["step", "node", "q", "q_reference"], qrows)?;
    let fields = VtkFields {
        scalars: vec![
            ("phi", sol.forward.state.phi[nm].clone()),
            ("phi_target", spec.phi_d().clone()),
            ("q", boundary_to_nodes(p, &sol.control.q[nm])),
        ],
        vectors: vec![("u", &sol.forward.state.u[nm])],
    };
    write_vtk(&path(ctx, "control_final.vtk"), p, "fraktur control final state", &fields)?;
    let k = sol.kkt;
    write_kv(
        &path(ctx, "kktn.csv"),
        &[
            ("init", k.init),
            ("stationarity_lower", k.stationarity_lower),
            ("irreversibility", k.irreversibility),
            ("dual_l2", k.dual_l2),
            ("sign_pi3", k.sign_pi3),
            ("sign_pi4", k.sign_pi4),
            ("stationarity", k.stationarity),
            ("complementarity", k.complementarity),
            ("complementarity_rel", k.complementarity_rel),
        ],
    )?;
    let err = sol.control.plus(-1.0, &q_dagger);
    let rel = (err.dot(&err) / q_dagger.dot(&q_dagger)).sqrt();
    let held = if sol.comp_held { "held" } else { "violated" };
    println!("iterations {}  cost {:e}  |grad| {:e}", sol.history.len() - 1, sol.cost, sol.grad_norm);
    println!("relative error to reference control {rel:e}");
    println!("omitted complementarity: {held}");
    println!("KKTN residuals: {k:?}");
    let code = if sol.line_search_failed {
        EXIT_LINE_SEARCH
    } else if sol.converged {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let mut o = Outcome::new(code);
    o.put("iterations", sol.history.len() - 1)
        .num("cost", sol.cost)
        .num("grad_norm", sol.grad_norm)
        .num("rel_error", rel)
        .put("complementarity", held)
        .num("kktn_feasibility", k.feasibility_max())
        .num("kktn_stationarity", k.stationarity);
    Ok(o)
}

pub fn probe(ctx: &Ctx) -> Result<Outcome> {
    let (_, _, sol) = forward_solve(ctx)?;
    let rep = regularity_probe(&ctx.p, &sol.state, ctx.cfg.probe.tol)?;
    let text = rep.to_string();
    fs::write(path(ctx, "probe.txt"), format!("{text}\n"))?;
    println!("{text}");
    let mut o = Outcome::new(if rep.north_ok { EXIT_OK } else { EXIT_NOT_REGULAR });
    o.put("north_ok", rep.north_ok)
        .num("infsup_a", rep.infsup_a)
        .num("infsup_b", rep.infsup_b)
        .put("degenerate", rep.degenerate());
    Ok(o)
}
