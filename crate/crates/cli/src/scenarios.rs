use std::path::PathBuf;

use dqlab_core::decoherence::{
    bell_amplitudes, dephase_offdiagonal, dephased_mixture, dephased_state_at, level_measurement_stats, mc_dephase,
    BellKind, DegenerateBellState, DephasingParams, LevelTable, NoiseModel, SublevelWeights, BELL_WEIGHTS,
};
use dqlab_core::fidelity::{
    avg_fidelity_closed, avg_fidelity_mc, fidelity_series_coefficient, fit_quadratic_loss, MAX_FIT_RATIO,
    MIN_MC_SAMPLES,
};
use dqlab_core::matcore::{phase_distance, ComplexMatrix, StateVector, C64};
use dqlab_core::singleatom::{
    compare_with_printed, expansion_residuals, hadamard_gate, ideal_hadamard, integrate_odes, log_log_slope,
    naive_block_phase, naive_hadamard_gate, naive_hadamard_prediction, reference_coupling, taylor_expand_gate,
    HadamardSchedule, PhysParams, RabiAmplitudes, PRINTED_MATCH_TOL,
};
use dqlab_core::twoatom::{
    cz_sequence, cz_sequence_literal, energy_bookkeeping, local_gate_library, solve_cz_time, template_entries,
    u_ab_closed, ProductBasisIndex, TwoAtomModel,
};
use rayon::prelude::*;

use crate::config::{
    ComplexPair, CzParams, DephaseParams, DephaseState, ExpandParams, FidelitySweepParams, HadamardParams, Params,
    RabiParams, ScenarioConfig,
};
use crate::error::{CliError, CliResult};
use crate::report::{emit_report, Report, Table, Value};

/// Longest Rabi time span accepted, in units of `1/Ω`.
pub const MAX_RABI_TIME: f64 = 1e4;
/// Tolerance for declaring a sequence a controlled-Z.
pub const CZ_TOL: f64 = 1e-10;

fn cx(p: ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

fn require(ok: bool, message: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(message.to_owned()))
    }
}

fn matrix_rows(table: &mut Table, prefix: &[Value], m: &ComplexMatrix) {
    for row in 0..m.rows() {
        for col in 0..m.cols() {
            let mut cells = prefix.to_vec();
            cells.extend([row.into(), col.into(), m[(row, col)].into()]);
            table.push(cells);
        }
    }
}

fn matrix_table(m: &ComplexMatrix) -> Table {
    let mut t = Table::new(&["row", "col", "value"]);
    matrix_rows(&mut t, &[], m);
    t
}

fn linspace(end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect()
}

/// Computes the report for `cfg` without writing it.
pub fn build_report(cfg: &ScenarioConfig) -> CliResult<Report> {
    let mut report = Report::new(cfg.command, cfg.seed);
    match &cfg.params {
        Params::Rabi(p) => rabi(p, &mut report)?,
        Params::Hadamard(p) => hadamard(p, &mut report)?,
        Params::Expand(p) => expand(p, &mut report)?,
        Params::FidelitySweep(p) => fidelity_sweep(p, cfg.seed, &mut report)?,
        Params::Cz(p) => cz(p, &mut report)?,
        Params::Dephase(p) => dephase(p, cfg.seed, &mut report)?,
    }
    Ok(report)
}

/// Runs `cfg` and writes its report. Returns the written paths.
pub fn run_scenario(cfg: &ScenarioConfig) -> CliResult<Vec<PathBuf>> {
    let report = build_report(cfg)?;
    emit_report(&report, cfg.format, &cfg.output_path)
}

fn rabi(p: &RabiParams, report: &mut Report) -> CliResult<()> {
    require(p.t_max > 0.0 && p.t_max <= MAX_RABI_TIME, "t_max must lie in (0, 1e4]")?;
    require(p.n_points >= 2, "n_points must be at least 2")?;
    let phys = PhysParams::new(1.0, p.frequency_ratio)?;
    let init = RabiAmplitudes::new([cx(p.alpha0), cx(p.alpha1)], [cx(p.beta0), cx(p.beta1)])?;
    let coupling = reference_coupling(&phys);
    let times = linspace(p.t_max, p.n_points);
    let states = times
        .par_iter()
        .map(|&t| integrate_odes(t, &init, &phys, p.detuning, &coupling))
        .collect::<dqlab_core::Result<Vec<_>>>()?;

    let closed_form_applies = init.beta[0] == C64::ZERO;
    let w = (1.0 + p.detuning * p.detuning).sqrt();
    let start_pop = init.alpha[0].norm_sqr();
    let mut table = Table::new(&[
        "omega_t",
        "alpha0",
        "alpha1",
        "beta0",
        "beta1",
        "pop_alpha0",
        "pop_alpha1",
        "pop_beta0",
        "pop_beta1",
        "beta0_pop_closed_form",
    ]);
    let (mut max_err, mut max_drift) = (0.0f64, 0.0f64);
    for (&t, s) in times.iter().zip(&states) {
        let pops = s.populations();
        let closed = start_pop * (w * t / 2.0).sin().powi(2) / (w * w);
        max_err = max_err.max((pops[2] - closed).abs());
        max_drift = max_drift.max((s.norm_sqr() - 1.0).abs());
        let mut row: Vec<Value> = vec![t.into()];
        row.extend(s.to_array().map(Value::from));
        row.extend(pops.map(Value::from));
        row.push(closed.into());
        table.push(row);
    }
    report.table("series", table);
    report.set("frequency_ratio", p.frequency_ratio);
    report.set("detuning", p.detuning);
    report.set("n_points", p.n_points);
    report.set("closed_form_applies", closed_form_applies);
    if closed_form_applies {
        report.set("max_closed_form_error", max_err);
    }
    report.set("max_norm_drift", max_drift);
    Ok(())
}

fn hadamard(p: &HadamardParams, report: &mut Report) -> CliResult<()> {
    let phys = PhysParams::new(1.0, p.frequency_ratio)?
        .with_spin_g_factor(p.spin_g_factor)?
        .with_field(p.field_ratio, p.field_angle)?;
    let gate = hadamard_gate(&phys)?;
    let ideal = ideal_hadamard();
    let schedule = HadamardSchedule::for_params(&phys);
    let naive = naive_hadamard_gate(&phys)?;
    report.set("phase_distance", phase_distance(&gate, &ideal));
    report.set("avg_fidelity", avg_fidelity_closed(&ideal, &gate)?);
    report.set("unitarity_defect", gate.unitarity_defect());
    report.set("is_perturbative", phys.is_perturbative());
    report.set("leading_free", schedule.leading_free);
    report.set("pulse", schedule.pulse);
    report.set("trailing_free", schedule.trailing_free);
    report.set("requires_reverse_free_evolution", schedule.requires_reverse_free_evolution());
    report.set("naive_phase_distance", phase_distance(&naive, &ideal));
    report.set("naive_block_phase", naive_block_phase(&phys));
    report.set("naive_prediction_error", naive.max_abs_diff(&naive_hadamard_prediction(&phys)));
    report.table("gate", matrix_table(&gate));
    report.table("naive_gate", matrix_table(&naive));
    Ok(())
}

fn expand(p: &ExpandParams, report: &mut Report) -> CliResult<()> {
    require(p.ratios.len() >= 2, "at least two field ratios are required")?;
    require(p.ratios.iter().all(|r| *r > 0.0), "field ratios must be positive")?;
    let phys = PhysParams::new(1.0, p.frequency_ratio)?.with_field(0.0, p.field_angle)?;
    let expansion = taylor_expand_gate(&phys, 2)?;
    let residuals = expansion_residuals(&phys, &expansion, &p.ratios)?;
    let comparisons = compare_with_printed(&phys, &expansion);

    let mut terms = Table::new(&["order", "row", "col", "value"]);
    for (order, term) in expansion.terms.iter().enumerate() {
        matrix_rows(&mut terms, &[order.into()], term);
    }
    let mut res = Table::new(&["field_ratio", "residual"]);
    for (r, e) in p.ratios.iter().zip(&residuals) {
        res.push(vec![(*r).into(), (*e).into()]);
    }
    let mut printed =
        Table::new(&["order", "row", "col", "numeric", "printed", "abs_error", "rel_error", "within_tolerance"]);
    for c in &comparisons {
        printed.push(vec![
            c.order.into(),
            c.row.into(),
            c.col.into(),
            c.numeric.into(),
            c.printed.into(),
            c.abs_error.into(),
            c.rel_error.into(),
            c.within_tolerance.into(),
        ]);
    }
    report.table("terms", terms);
    report.table("residuals", res);
    report.table("printed_comparison", printed);
    report.set("order0_error", expansion.terms[0].max_abs_diff(&ideal_hadamard()));
    if residuals.iter().all(|r| *r > 0.0) {
        report.set("residual_slope", log_log_slope(&p.ratios, &residuals)?);
    }
    for (k, spread) in expansion.richardson_spread.iter().enumerate() {
        report.set(&format!("richardson_spread_{k}"), *spread);
    }
    report.set("printed_entries", comparisons.len());
    report.set("printed_mismatches", comparisons.iter().filter(|c| !c.within_tolerance).count());
    report.set("printed_tolerance", PRINTED_MATCH_TOL);
    Ok(())
}

fn fidelity_sweep(p: &FidelitySweepParams, seed: u64, report: &mut Report) -> CliResult<()> {
    require(!p.ratios.is_empty() && !p.angles.is_empty(), "ratios and angles must be non-empty")?;
    require(p.mc_samples == 0 || p.mc_samples >= MIN_MC_SAMPLES, "mc_samples must be 0 or at least 1000")?;
    let base = PhysParams::new(1.0, p.frequency_ratio)?;
    let points: Vec<(f64, f64)> =
        p.angles.iter().flat_map(|&theta| p.ratios.iter().map(move |&r| (r, theta))).collect();
    let ideal = ideal_hadamard();
    let results = points
        .par_iter()
        .enumerate()
        .map(|(k, &(r, theta))| {
            let gate = hadamard_gate(&base.with_field(r, theta)?)?;
            let closed = avg_fidelity_closed(&ideal, &gate)?;
            let mc = if p.mc_samples > 0 {
                Some(avg_fidelity_mc(&ideal, &gate, p.mc_samples, seed.wrapping_add((k as u64) << 32))?)
            } else {
                None
            };
            Ok((closed, mc))
        })
        .collect::<dqlab_core::Result<Vec<_>>>()?;

    let columns: &[&str] = if p.mc_samples > 0 {
        &["field_ratio", "field_angle", "fidelity", "mc_estimate", "mc_stderr"]
    } else {
        &["field_ratio", "field_angle", "fidelity"]
    };
    let mut sweep = Table::new(columns);
    for (&(r, theta), (closed, mc)) in points.iter().zip(&results) {
        let mut row: Vec<Value> = vec![r.into(), theta.into(), (*closed).into()];
        if let Some(m) = mc {
            row.extend([m.estimate.into(), m.stderr.into()]);
        }
        sweep.push(row);
    }
    report.table("sweep", sweep);

    let series = fidelity_series_coefficient(p.frequency_ratio, 1.0, 1.0)?;
    report.set("c2_series", series);
    report.set("points", points.len());
    report.set("mc_samples", p.mc_samples);
    report.set("min_fidelity", results.iter().map(|(f, _)| *f).fold(f64::INFINITY, f64::min));

    let mut distinct = p.ratios.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let fittable = distinct.len() >= 3
        && distinct.iter().all(|r| (0.0..=MAX_FIT_RATIO).contains(r))
        && distinct.iter().any(|r| *r > 0.0);
    report.set("fitted", fittable);
    if fittable {
        let mut fits = Table::new(&["field_angle", "c2_hat", "c2_series", "rel_diff", "max_rel_residual"]);
        for &theta in &p.angles {
            let fit = fit_quadratic_loss(&base, &p.ratios, theta)?;
            let rel = (fit.c2_hat - series) / series;
            fits.push(vec![theta.into(), fit.c2_hat.into(), series.into(), rel.into(), fit.max_rel_residual.into()]);
        }
        report.table("fits", fits);
    }
    Ok(())
}

fn cz(p: &CzParams, report: &mut Report) -> CliResult<()> {
    let model = TwoAtomModel::new(p.frequency_ratio, cx(p.coupling), 1.0)?;
    let timing = if model.exchange_rate() > 0.0 { Some(solve_cz_time(&model)?) } else { None };
    let t = match (p.time, timing) {
        (Some(t), _) => {
            require(t.is_finite() && t >= 0.0, "time must be finite and non-negative")?;
            t
        }
        (None, Some(timing)) => timing.balanced,
        (None, None) => return Err(CliError::Config("zero coupling requires an explicit time".into())),
    };
    let u = u_ab_closed(t, &model);
    let (cv, dv) = template_entries(&u)?;
    let (u5, diag) = if p.literal { cz_sequence_literal(&u, cv, dv)? } else { cz_sequence(&u, cv, dv)? };

    if let Some(timing) = timing {
        report.set("t_star", timing.balanced);
        report.set("t_literal", timing.literal);
        report.set("timing_discrepancy", timing.discrepancy);
    }
    report.set("time", t);
    report.set("exchange_rate", model.exchange_rate());
    report.set("literal", p.literal);
    report.set("c", diag.c);
    report.set("d", diag.d);
    report.set("theta", diag.theta);
    report.set("offdiag_max", diag.offdiag_max);
    report.set("phase", diag.phase);
    report.set("expected_phase", diag.expected_phase);
    report.set("pattern_error", diag.pattern_error);
    report.set("alignment", diag.alignment);
    report.set(
        "is_controlled_z",
        diag.offdiag_max < CZ_TOL && diag.pattern_error < CZ_TOL && (diag.phase + 1.0).norm() < CZ_TOL,
    );
    report.set("energy_residual_half_splitting", energy_bookkeeping(&model, p.frequency_ratio / 2.0).residual);
    report.set("energy_residual_quarter_splitting", energy_bookkeeping(&model, p.frequency_ratio / 4.0).residual);

    let mut diagonal = Table::new(&["index", "atom_a", "atom_b", "value"]);
    for k in 0..16 {
        let idx = ProductBasisIndex::from_flat(k)?;
        diagonal.push(vec![k.into(), idx.atom_a().into(), idx.atom_b().into(), u5[(k, k)].into()]);
    }
    report.table("u5_diagonal", diagonal);
    let gates = local_gate_library(cv, dv)?;
    let mut lib = Table::new(&["gate", "row", "col", "value"]);
    for (name, m) in gates.all() {
        matrix_rows(&mut lib, &[name.into()], m);
    }
    report.table("local_gates", lib);
    Ok(())
}

fn set_levels(report: &mut Report, prefix: &str, t: &LevelTable) {
    for (k, v) in t.as_map() {
        report.set(&format!("{prefix}.{k}"), v);
    }
}

fn dephase(p: &DephaseParams, seed: u64, report: &mut Report) -> CliResult<()> {
    require(p.t_max > 0.0, "t_max must be positive")?;
    require(p.n_times >= 2, "n_times must be at least 2")?;
    let noise = NoiseModel::new(p.moment, p.noise)?;
    let params = DephasingParams::new(noise, linspace(p.t_max, p.n_times), p.n_traj, p.n_steps, seed)?;
    let (amplitudes, weights, listed) = match p.state {
        DephaseState::BellPlus | DephaseState::BellMinus => {
            let sign = if p.state == DephaseState::BellPlus { 1.0 } else { -1.0 };
            (bell_amplitudes(sign).to_vec(), BELL_WEIGHTS.to_vec(), None)
        }
        DephaseState::Psi0 | DephaseState::Psi1 => {
            let kind = if p.state == DephaseState::Psi0 { BellKind::Plus0011 } else { BellKind::Plus0110 };
            let state = DegenerateBellState::new(kind, cx(p.a[0]), cx(p.a[1]), cx(p.b[0]), cx(p.b[1]))?;
            let sw = match p.weights {
                Some(w) => SublevelWeights(w),
                None => SublevelWeights::zeeman(p.spin_g_factor)?,
            };
            for (k, w) in sw.0.iter().enumerate() {
                report.set(&format!("weight_{k}"), *w);
            }
            (state.amplitudes().to_vec(), sw.pair_weights().to_vec(), Some(state.listed_mixture()))
        }
    };
    let mc = mc_dephase(&amplitudes, &weights, &params)?;

    let mut coherence =
        Table::new(&["time", "weight_difference", "analytic", "mc_mean", "mc_stderr", "mc_rate", "analytic_rate"]);
    for (k, &t) in mc.times.iter().enumerate() {
        for (d, &diff) in mc.differences.iter().enumerate() {
            let mean = mc.mean[k][d];
            let rate = if t > 0.0 && mean.re > 0.0 { -mean.re.ln() / t } else { f64::NAN };
            coherence.push(vec![
                t.into(),
                diff.into(),
                noise.coherence(diff, t).into(),
                mean.into(),
                mc.stderr[k][d].into(),
                rate.into(),
                (0.5 * diff * diff * noise.variance_rate()).into(),
            ]);
        }
    }
    report.table("coherence", coherence);

    let last = mc.times.len() - 1;
    let t_final = mc.times[last];
    let analytic = dephased_state_at(&amplitudes, &weights, &noise, t_final)?;
    let sampled = mc.density_at(last);
    let mut density = Table::new(&["row", "col", "analytic", "mc"]);
    for row in 0..analytic.rows() {
        for col in 0..analytic.cols() {
            let (a, m) = (analytic[(row, col)], sampled[(row, col)]);
            if a != C64::ZERO || m != C64::ZERO {
                density.push(vec![row.into(), col.into(), a.into(), m.into()]);
            }
        }
    }
    report.table("final_density", density);

    let pure = StateVector::new(amplitudes.clone())?.projector();
    let mixture = dephased_mixture(&amplitudes, &weights)?;
    let levels_pure = level_measurement_stats(&pure)?;
    let levels_mixture = level_measurement_stats(&mixture)?;
    let levels_mc = level_measurement_stats(&sampled)?;
    set_levels(report, "levels_pure", &levels_pure);
    set_levels(report, "levels_mixture", &levels_mixture);
    set_levels(report, "levels_mc_final", &levels_mc);
    report.set("level_table_deviation", levels_pure.max_abs_diff(&levels_mixture));
    report.set("final_time", t_final);
    report.set("final_density_error", sampled.max_abs_diff(&analytic));
    report.set("step_variance", params.step_variance());
    report.set("n_traj", p.n_traj);
    report.set("n_steps", p.n_steps);
    match listed {
        None => {
            let exact = dephase_offdiagonal(&noise, t_final)?;
            let (got, se) = mc.coherence(last, 2.0).expect("Bell states carry a two-unit difference");
            report.set("offdiag_analytic_final", exact);
            report.set("offdiag_mc_final", got);
            report.set("offdiag_mc_stderr", se);
            report.set("offdiag_rel_error", (got - exact) / exact);
        }
        Some(listed) => {
            report.set("listed_mixture_deviation", mixture.max_abs_diff(&listed));
        }
    }
    Ok(())
}
