//! Experiment drivers. Each writes its artifacts into the output directory
//! and returns a report of every requirement it checked; a library error in
//! the middle of a run becomes a failing check naming the phase.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stochlab_core::blocks::{audit_bijection, audit_gap_filling, audit_levels};
use stochlab_core::nonadaptive::received_by_h;
use stochlab_core::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{io_error, LabResult};
use crate::io::{load_bitset, load_permutation, save_bitset, save_permutation, save_trace, TraceRow};
use crate::report::Report;

/// Largest host written out as a permutation file.
const MAX_SAVED_HOST: u64 = 1 << 22;

/// A failed phase: the library error is recorded and the run stops.
struct Abort;

type Step<T> = std::result::Result<T, Abort>;

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    report: Report,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn attempt<T>(&mut self, phase: &str, result: std::result::Result<T, impl std::fmt::Display>) -> Step<T> {
        result.map_err(|e| {
            self.report.fail(phase, e.to_string());
            Abort
        })
    }

    fn profile_trace(&mut self, name: &str, a: &BitPrefix) -> Step<()> {
        if a.is_empty() {
            return Ok(());
        }
        let profile: Result<ExactProfile> = density_profile(a, self.config.n_min.min(a.len()));
        let profile = self.attempt("density-profile", profile)?;
        let rows: Vec<TraceRow> = profile.samples.into_iter().map(|(n, rho)| TraceRow { n, rho }).collect();
        let path = self.path(name);
        self.attempt("write-trace", save_trace(&path, &rows))
    }
}

/// Runs the configured experiment; `Err` only for configuration or output
/// problems, never for a failed check.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> LabResult<Report> {
    config.validate()?;
    fs::create_dir_all(out).map_err(io_error(out))?;
    let mut ctx = Ctx { config, out, report: Report::default() };
    let _ = match config.kind()? {
        ExperimentKind::ConstructH => construct_h_run(&mut ctx),
        ExperimentKind::NonadaptiveGame => nonadaptive_run(&mut ctx),
        ExperimentKind::AdaptiveGame => adaptive_run(&mut ctx),
        ExperimentKind::WeakStochasticTrace => trace_run(&mut ctx),
        ExperimentKind::CountBig => count_big_run(&mut ctx),
        ExperimentKind::BuildX => build_x_run(&mut ctx),
        ExperimentKind::AlphaShift => alpha_shift_run(&mut ctx),
    };
    let report = ctx.report;
    let path = out.join("report.txt");
    fs::write(&path, report.to_string()).map_err(io_error(path))?;
    Ok(report)
}

fn build_host(ctx: &mut Ctx<'_>, stages: u64) -> Step<HostPermutation> {
    let params = ctx.config.sizing.params();
    ctx.attempt("construct-h", construct_h_with(stages, &params))
}

fn construct_h_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let h = build_host(ctx, ctx.config.stages)?;
    let host = audit_host(&h).map(|_| format!("{} doors", h.total_len()));
    ctx.report.check("host-bijection", host.is_ok(), host.unwrap_or_else(|e| e.to_string()));
    let largeness = ctx.config.sizing == crate::config::Sizing::Largeness;
    for (i, block) in h.blocks().iter().enumerate() {
        let s = i as u64 + 1;
        let audits = audit_bijection(block).and(audit_gap_filling(block)).and(audit_levels(block));
        let span = format!("doors {}..={} level {}", block.floor(), block.ceil(), block.level());
        match audits {
            Ok(()) => ctx.report.pass(format!("block-{s}-audit"), span),
            Err(e) => ctx.report.fail(format!("block-{s}-audit"), e.to_string()),
        }
        if largeness {
            let ok = largeness_ok(block, s);
            ctx.report.check(format!("block-{s}-largeness"), ok, format!("|IF| = {}", block.if_len()));
        }
    }
    if h.total_len() <= MAX_SAVED_HOST {
        let forward = (0..h.total_len()).map(|t| h_eval(&h, t)).collect::<Result<Vec<_>>>();
        let forward = ctx.attempt("host-permutation", forward)?;
        let pi = ctx.attempt("host-permutation", FinitePermutation::from_forward(forward))?;
        let path = ctx.path("host.perm");
        ctx.attempt("write-host", save_permutation(&path, &pi))?;
    }
    Ok(())
}

fn nonadaptive_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let specs = ctx.config.strategies();
    let members = specs.iter().map(|s| catalog::selector(s)).collect::<Result<Vec<_>>>();
    let family = OpponentFamily::new(ctx.attempt("family", members)?);
    let h = build_host(ctx, ctx.config.stages)?;
    let budget = ctx.config.budget;
    let out = ctx.attempt("host-assignment", build_host_assignment(&family, &h, budget))?;
    for (id, stage, fault) in &out.dropped {
        ctx.report.pass(format!("drop[{}]", family.members()[*id].name()), format!("stage {stage}: {fault}"));
    }
    for rec in &out.stages {
        let s = rec.stage;
        match ctx.attempt(&format!("G_{s}"), check_g(&out.assignment, &h, s))? {
            Some(n) => ctx.report.pass(format!("G_{s}"), format!("n={n}")),
            None => ctx.report.fail(format!("G_{s}"), "no witness inside the prefix"),
        }
        for &id in &rec.members {
            let f = &family.members()[id];
            let name = format!("P_{s}[{}]", f.name());
            let doors = f.image_within(rec.doors.0, out.assignment.len() - 1, budget);
            let doors = ctx.attempt(&name, doors)?;
            match stochlab_core::nonadaptive::find_p_violation(&out.assignment, &doors, s, rec.doors.0) {
                None => ctx.report.pass(name, format!("from door {}", rec.doors.0)),
                Some(v) => ctx.report.fail(name, format!("cars {} and {} with {} opened", v.car, v.next_car, v.opened)),
            }
        }
    }
    let received = ctx.attempt("received", received_by_h(&out.assignment, &h))?;
    ctx.attempt("write-assignment", save_bitset(&ctx.path("assignment.bits"), &out.assignment))?;
    ctx.profile_trace("received.csv", &BitPrefix::new(received))
}

fn adaptive_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let specs = ctx.config.strategies();
    let budget = ctx.config.contestant_budget;
    let family = specs.iter().map(|s| catalog::contestant(s).map(|g| g.with_budget(budget))).collect::<Result<Vec<_>>>();
    let family = ctx.attempt("family", family)?;
    let h = build_host(ctx, ctx.config.host_stages())?;
    let out = build_adaptive_assignment(&family, &h, ctx.config.stages, ctx.config.witness_cap);
    let out = ctx.attempt("adaptive-assignment", out)?;
    for (id, stage, fault) in &out.dropped {
        ctx.report.pass(format!("drop[{}]", family[*id].name()), format!("stage {stage}: {fault}"));
    }
    ctx.report.check("ledger-disjoint", out.ledger.is_disjoint(), format!("{} cars", out.ledger.cars().len()));
    for rec in &out.stages {
        let (s, n) = (rec.stage, rec.block);
        match ctx.attempt(&format!("G_{s}"), check_g(&out.assignment, &h, n))? {
            Some(w) => ctx.report.pass(format!("G_{s}"), format!("block {n}, n={w}")),
            None => ctx.report.fail(format!("G_{s}"), format!("block {n}: no witness inside the prefix")),
        }
        for &id in &rec.members {
            let g = &family[id];
            let name = format!("P_{s}[{}]", g.name());
            match check_adaptive_p(&out.view(), g, n, rec.doors.0..=rec.doors.1) {
                Ok(AdaptivePCheck::Pass) => ctx.report.pass(name, format!("{n} goats after each car")),
                Ok(other) => ctx.report.fail(name, format!("{other:?}")),
                Err(fault) => ctx.report.fail(name, fault.to_string()),
            }
        }
    }
    let received = ctx.attempt("received", received_by_h(&out.assignment, &h))?;
    ctx.attempt("write-assignment", save_bitset(&ctx.path("assignment.bits"), &out.assignment))?;
    ctx.profile_trace("received.csv", &BitPrefix::new(received))
}

fn bernoulli(seed: u64, len: u64) -> BitPrefix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BitPrefix::from_fn(len, |_| rng.gen_bool(0.5))
}

fn trace_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let config = ctx.config;
    let base = match &config.input {
        Some(path) => ctx.attempt("input", load_bitset(path))?,
        None => bernoulli(config.seed.expect("validated"), config.prefix_len),
    };
    let a = if config.join { ctx.attempt("join", join(&base, &base))? } else { base.clone() };
    let spec = &config.strategies()[0];
    let rule = ctx.attempt("rule", catalog::skip_rule(spec))?;
    let run = ctx.attempt("apply", apply_skip_rule(&rule, &a, usize::MAX))?;
    let orderly = run.trace.entries().windows(2).all(|w| w[0].door < w[1].door);
    ctx.report.check(format!("orderly[{spec}]"), orderly, format!("{} doors opened", run.trace.len()));

    // The halved rule on A keeps at least half of the rule's peak on A ⊕ A.
    let doubled = ctx.attempt("join", join(&base, &base))?;
    let plain = ctx.attempt("apply", apply_skip_rule(&rule, &doubled, usize::MAX))?;
    let halved_rule = halve_rule(ctx.attempt("rule", catalog::skip_rule(spec))?);
    let halved = ctx.attempt("apply", apply_skip_rule(&halved_rule, &base, usize::MAX))?;
    if !plain.selected.is_empty() && !halved.selected.is_empty() {
        let fp: ExactProfile = ctx.attempt("density-profile", density_profile(&plain.selected, 1))?;
        let gp: ExactProfile = ctx.attempt("density-profile", density_profile(&halved.selected, 1))?;
        let ok = gp.max_rho * 2 >= fp.max_rho;
        ctx.report.check(format!("halving[{spec}]"), ok, format!("{} vs {}/2", gp.max_rho, fp.max_rho));
    }

    if config.input.is_none() {
        ctx.attempt("write-input", save_bitset(&ctx.path("input.bits"), &base))?;
    }
    ctx.attempt("write-selected", save_bitset(&ctx.path("selected.bits"), &run.selected))?;
    ctx.profile_trace("trace.csv", &run.selected)
}

fn count_big_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let n = ctx.config.n;
    let size = ctx.attempt("size", 4u64.checked_pow(n).ok_or("4^n overflows"))?;
    let mut perms = Vec::new();
    if let Some(path) = &ctx.config.input {
        perms.push((path.display().to_string(), ctx.attempt("input", load_permutation(path))?));
    }
    if ctx.config.input.is_none() || !ctx.config.strategies.is_empty() {
        for spec in ctx.config.strategies() {
            perms.push((spec.clone(), ctx.attempt(&spec, catalog::permutation(&spec, size))?));
        }
    }
    for (name, pi) in &perms {
        let label = format!("bigness-bound[{name}]");
        let count = ctx.attempt(&label, count_big(pi, n))?;
        ctx.report.pass(label, format!("count {} bound {}", count.count, count.bound));
        for r in count.reports.iter().filter(|r| r.is_big) {
            let (s, k) = (r.minimal_s.expect("big"), r.k.expect("big"));
            let check = format!("witness-below-nk[{name}][{}]", r.sub_block_index);
            ctx.report.check(check, s < n as u64 * k, format!("s={s} k={k}"));
        }
    }
    Ok(())
}

fn build_x_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let ceiling = ctx.config.ceiling;
    let horizon = ctx.attempt("horizon", ordered_block(ceiling))?.end;
    let perms = ctx.config.strategies().iter().map(|s| catalog::fragment(s, horizon)).collect::<Result<Vec<_>>>();
    let perms = ctx.attempt("permutations", perms)?;
    let state = ctx.attempt("build-x", build_x_greedy(&perms, ctx.config.stages, ceiling))?;
    for st in &state.stages {
        let witness = format!("block {} sub-block {} doors {}..{} sigma={}", st.block, st.sub_block, st.doors.start, st.doors.end, st.restraint);
        ctx.report.pass(format!("stage-{}", st.stage), witness);
    }
    if let Some(failure) = &state.failure {
        ctx.report.fail(format!("stage-{}", state.stages.len()), failure.clone());
    }
    for c in ctx.attempt("verify", verify_greedy(&state, &perms))? {
        let detail = format!("max rho {} on ({}, {}] vs {}", c.worst, c.window.0, c.window.1, c.bound);
        ctx.report.check(format!("small[{}][{}]", c.stage, perms[c.perm].name()), c.ok(), detail);
    }
    let x = state.prefix(state.covered_len());
    let exits = ctx.attempt("scanner", scanner_exit_densities::<Rational>(&x))?;
    for st in &state.stages {
        if let Some((_, rho)) = exits.iter().find(|(m, _)| *m == st.block) {
            ctx.report.check(format!("scanner[{}]", st.block), *rho >= Rational::new(1, 3), format!("rho {rho}"));
        }
    }
    let mut rows = Vec::new();
    for (m, rho) in exits {
        let end = ctx.attempt("scanner", ordered_block(m))?.end;
        rows.push(TraceRow { n: end, rho });
    }
    ctx.attempt("write-x", save_bitset(&ctx.path("x.bits"), &x))?;
    ctx.attempt("write-trace", save_trace(&ctx.path("scanner.csv"), &rows))
}

fn alpha_shift_run(ctx: &mut Ctx<'_>) -> Step<()> {
    let config = ctx.config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.expect("validated"));
    let size = config.size;
    for trial in 0..config.trials {
        let px = rng.gen_range(0.05..0.6);
        let py = rng.gen_range(0.05..0.95);
        let x = BitPrefix::from_fn(size, |_| rng.gen_bool(px));
        let y = BitPrefix::from_fn(size, |_| rng.gen_bool(py));
        let pi = FinitePermutation::random(size, &mut rng);
        let name = format!("alpha-shift[{trial}]");
        match alpha_shift_check(&x, &y, &pi, &config.q, &config.alpha, config.k) {
            Ok(ws) => {
                let above = ws.iter().filter(|w| w.rho_union > config.alpha + config.q / 2).count();
                ctx.report.pass(name, format!("{} witnesses, {above} above alpha + q/2", ws.len()));
            }
            Err(e) => ctx.report.fail(name, e.to_string()),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> (Report, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::parse(text).unwrap();
        (run_experiment(&config, dir.path()).unwrap(), dir)
    }

    #[test]
    fn count_big_identity() {
        let (report, _dir) = run("kind = count-big\nn = 3\npermutation = identity\n");
        assert!(report.all_passed());
        assert_eq!(report.checks[0].detail, "count 2 bound 2283/280");
    }

    #[test]
    fn construct_h_stage_one() {
        let (report, dir) = run("kind = construct-h\nstages = 1\n");
        assert!(report.all_passed(), "{report}");
        assert_eq!(fs::read_to_string(dir.path().join("host.perm")).unwrap().lines().count(), 14);
    }

    #[test]
    fn oversized_host_is_a_failing_check() {
        let (report, _dir) = run("kind = construct-h\nstages = 2\n");
        assert_eq!(report.checks.len(), 1);
        assert!(!report.all_passed());
        assert_eq!(report.checks[0].name, "construct-h");
    }
}
