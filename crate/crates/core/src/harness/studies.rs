use std::time::Instant;

use rand::Rng;

use crate::channel::{corrupt_csi, db_to_linear, linear_to_db, rician_channel, ChannelRealization};
use crate::detectors::{
    build_gram, build_gram_with, iterate_conventional, iterate_preconditioned, lmmse_direct,
    residual, stage1_block_invert, ChannelGram, ClusterPartition, FlopLedger, GramSystem, Method,
    PreconditionedSystem, Trajectory,
};
use crate::error::Result;
use crate::linalg::{hermitian_gram, CVector, C64};
use crate::metrics::{
    condition_number, correlation_heatmap, correlation_summary, count_symbol_errors, demodulate,
    empirical_cdf, gershgorin_bound, median, modulate, Constellation, SerCurve, HEATMAP_FLOOR_DB,
};
use crate::rng::{complex_gaussian, rng_for, stream};

use super::config::ScenarioConfig;
use super::montecarlo::{monte_carlo, trial_seed, with_threads, MonteCarloRun};
use super::result::{
    iterations_to_reference, variant_name, ConditioningPayload, ConvergenceFailures,
    ConvergencePayload, ExperimentResult, HeatmapPayload, IterationsToReference, Payload,
    RobustnessPayload, Study, TrialFailure, SCHEMA_VERSION,
};

/// Relative residual above which a finished run counts as not converged.
pub const CONVERGENCE_RESIDUAL: f64 = 1e-6;

/// Runs one study with the configured worker count.
pub fn run_study(cfg: &ScenarioConfig, study: Study) -> Result<ExperimentResult> {
    cfg.validate()?;
    with_threads(cfg.monte_carlo.threads, || match study {
        Study::Study1 => run_case_study_1(cfg),
        Study::Study2 => run_case_study_2(cfg),
        Study::Study3 => run_case_study_3(cfg),
        Study::Study4 => run_case_study_4(cfg),
    })?
}

struct Scenario {
    layout: crate::channel::ClusterLayout,
    partition: ClusterPartition,
    constellation: Constellation,
}

impl Scenario {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Scenario {
            layout: cfg.cluster_layout()?,
            partition: cfg.layout.partition()?,
            constellation: cfg.constellation()?,
        })
    }

    /// Channel at the operating SNR.
    fn channel(&self, cfg: &ScenarioConfig, seed: u64) -> Result<ChannelRealization> {
        let chan = rician_channel(&cfg.geometry, &self.layout, &cfg.budget, &cfg.rician, seed)?;
        Ok(match cfg.detection.snr_db {
            Some(snr) => chan.with_snr_db(snr),
            None => chan,
        })
    }
}

fn finish(
    cfg: &ScenarioConfig,
    study: Study,
    started: Instant,
    trials: usize,
    failures: Vec<(usize, String)>,
    ledger: FlopLedger,
    payload: Payload,
) -> ExperimentResult {
    ExperimentResult {
        schema_version: SCHEMA_VERSION.to_string(),
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        study,
        config: cfg.clone(),
        trials,
        failed_trials: failures
            .into_iter()
            .map(|(trial, message)| TrialFailure { trial, message })
            .collect(),
        ledger,
        wall_time_s: started.elapsed().as_secs_f64(),
        payload,
    }
}

fn merged_ledger<'a>(ledgers: impl Iterator<Item = &'a FlopLedger>) -> FlopLedger {
    let mut total = FlopLedger::new();
    for l in ledgers {
        total.merge(l);
    }
    total
}

/// Normalized `|A|` heatmap of a single realization.
pub fn run_case_study_1(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let sc = Scenario::new(cfg)?;
    let chan = sc.channel(cfg, trial_seed(cfg.monte_carlo.seed, 0))?;
    let a = hermitian_gram(&chan.h, 1.0 / chan.rho)?;
    let mut ledger = FlopLedger::new();
    ledger.record_gram(chan.num_antennas(), chan.num_users());
    let heatmap = correlation_heatmap(a.matrix(), HEATMAP_FLOOR_DB)?;
    let summary = correlation_summary(a.matrix(), &sc.partition)?;
    let payload = HeatmapPayload {
        snr_db: linear_to_db(chan.rho),
        heatmap,
        gap_db: summary.gap_db(),
        summary,
    };
    Ok(finish(
        cfg,
        Study::Study1,
        started,
        1,
        vec![],
        ledger,
        Payload::Heatmap(payload),
    ))
}

struct ConditioningTrial {
    kappa_a: f64,
    kappa_psi: f64,
    delta_norm: f64,
    bound_informative: bool,
    bound_holds: bool,
    ledger: FlopLedger,
}

/// Condition numbers of `A` and `Ψ` across realizations.
pub fn run_case_study_2(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let sc = Scenario::new(cfg)?;
    let run = monte_carlo(cfg.monte_carlo.trials, cfg.monte_carlo.seed, |_, seed| {
        let chan = sc.channel(cfg, seed)?;
        let mut ledger = FlopLedger::new();
        let sys = build_gram(&chan, &CVector::zeros(chan.num_antennas()), &mut ledger)?;
        let pre = stage1_block_invert(&sys, &sc.partition, &mut ledger)?;
        let check = gershgorin_bound(&pre)?;
        Ok(ConditioningTrial {
            kappa_a: condition_number(sys.a())?,
            kappa_psi: check.kappa_psi,
            delta_norm: check.delta_norm,
            bound_informative: check.is_informative(),
            bound_holds: check.is_informative() && check.holds,
            ledger,
        })
    })?;

    let r = &run.results;
    let ka: Vec<f64> = r.iter().map(|t| t.kappa_a).collect();
    let kp: Vec<f64> = r.iter().map(|t| t.kappa_psi).collect();
    let ratios: Vec<f64> = r.iter().map(|t| t.kappa_a / t.kappa_psi).collect();
    let deltas: Vec<f64> = r.iter().map(|t| t.delta_norm).collect();
    let kappa_a = empirical_cdf("A", &ka)?;
    let kappa_psi = empirical_cdf("Psi", &kp)?;
    let (median_kappa_a, median_kappa_psi) = (kappa_a.median(), kappa_psi.median());
    let payload = ConditioningPayload {
        snr_db: cfg
            .detection
            .snr_db
            .unwrap_or_else(|| linear_to_db(budget_rho(cfg))),
        median_kappa_a,
        median_kappa_psi,
        ratio_of_medians: median_kappa_a / median_kappa_psi,
        median_ratio: median(&ratios),
        median_delta_norm: median(&deltas),
        bound_informative: r.iter().filter(|t| t.bound_informative).count(),
        bound_holds: r.iter().filter(|t| t.bound_holds).count(),
        kappa_a,
        kappa_psi,
    };
    let ledger = merged_ledger(r.iter().map(|t| &t.ledger));
    Ok(finish(
        cfg,
        Study::Study2,
        started,
        run.trials(),
        run.failures,
        ledger,
        Payload::Conditioning(payload),
    ))
}

fn budget_rho(cfg: &ScenarioConfig) -> f64 {
    crate::channel::link_snr(
        &cfg.budget,
        crate::channel::fspl_db(cfg.budget.link_distance_m, cfg.geometry.carrier_hz),
    )
}

/// Random symbols for one trial and their unit-energy constellation points.
pub fn draw_symbols(
    constellation: &Constellation,
    users: usize,
    seed: u64,
) -> Result<(Vec<usize>, CVector)> {
    let mut rng = rng_for(seed, stream::SYMBOLS);
    let symbols: Vec<usize> = (0..users)
        .map(|_| rng.random_range(0..constellation.order()))
        .collect();
    let x = modulate(&symbols, constellation, 1.0)?;
    Ok((symbols, x))
}

/// Draws `count` independent unit-variance `CN(0, I_M)` noise vectors.
pub fn draw_unit_noise(antennas: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = rng_for(seed, stream::NOISE);
    (0..count)
        .map(|_| {
            (0..antennas)
                .map(|_| complex_gaussian(&mut rng, 1.0))
                .collect()
        })
        .collect()
}

/// `y = H·x + v/√ρ`.
fn receive(chan: &ChannelRealization, x: &CVector, unit_noise: &[C64]) -> Result<CVector> {
    let hx = chan.h.mul_vec(x)?;
    let s = chan.noise_variance().sqrt();
    CVector::new(hx.iter().zip(unit_noise).map(|(a, v)| a + v * s).collect())
}

/// Estimate after `t` iterations (`t = 0` is the start point).
fn estimate_at<'a>(tr: &'a Trajectory, x0: &'a CVector, t: usize) -> &'a CVector {
    if t == 0 {
        x0
    } else {
        tr.iterate(t).unwrap_or(&tr.last)
    }
}

fn errors_over_iterations(
    tr: &Trajectory,
    x0: &CVector,
    max_iters: usize,
    constellation: &Constellation,
    sent: &[usize],
) -> Vec<u64> {
    (0..=max_iters)
        .map(|t| {
            count_symbol_errors(&demodulate(estimate_at(tr, x0, t), constellation), sent) as u64
        })
        .collect()
}

struct Detection {
    sys: GramSystem,
    pre: PreconditionedSystem,
    lmmse: CVector,
}

fn detect(
    chan: &ChannelRealization,
    gram: &ChannelGram,
    y: &CVector,
    part: &ClusterPartition,
    ledger: &mut FlopLedger,
) -> Result<Detection> {
    let sys = build_gram_with(gram, chan, y, ledger)?;
    let pre = stage1_block_invert(&sys, part, ledger)?;
    let lmmse = lmmse_direct(&sys)?;
    Ok(Detection { sys, pre, lmmse })
}

struct VariantRun {
    errors: Vec<u64>,
    diverged: bool,
    not_converged: bool,
}

struct ConvergenceTrial {
    lmmse_errors: u64,
    /// Conventional then proposed, per configured method.
    variants: Vec<VariantRun>,
    ledger: FlopLedger,
}

/// SER against iteration index for every configured splitting, run both
/// conventionally from zero and on the preconditioned system from `x̃`.
pub fn run_case_study_3(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let sc = Scenario::new(cfg)?;
    let det = &cfg.detection;
    let t_max = det.max_iters;
    let users = cfg.num_users();

    let run: MonteCarloRun<ConvergenceTrial> =
        monte_carlo(cfg.monte_carlo.trials, cfg.monte_carlo.seed, |_, seed| {
            let chan = sc.channel(cfg, seed)?;
            let (sent, x) = draw_symbols(&sc.constellation, users, seed)?;
            let noise = draw_unit_noise(chan.num_antennas(), 1, seed);
            let y = receive(&chan, &x, &noise[0])?;
            let mut ledger = FlopLedger::new();
            let d = detect(
                &chan,
                &ChannelGram::new(&chan.h)?,
                &y,
                &sc.partition,
                &mut ledger,
            )?;
            let lmmse_errors =
                count_symbol_errors(&demodulate(&d.lmmse, &sc.constellation), &sent) as u64;

            let zero = CVector::zeros(users);
            let mut variants = Vec::with_capacity(2 * det.methods.len());
            for &method in &det.methods {
                let icfg = det.iterative(method, t_max);
                let conv = iterate_conventional(&d.sys, &icfg, &zero, &mut ledger)?;
                let prop = iterate_preconditioned(&d.pre, &icfg, &mut ledger)?;
                let res_conv = residual(&d.sys, &conv.last)?;
                let res_prop = residual(&d.pre, &prop.last)?;
                for (tr, x0, res) in [(&conv, &zero, res_conv), (&prop, d.pre.x_tilde(), res_prop)]
                {
                    variants.push(VariantRun {
                        errors: errors_over_iterations(tr, x0, t_max, &sc.constellation, &sent),
                        diverged: tr.diverged,
                        not_converged: tr.diverged || !(res <= CONVERGENCE_RESIDUAL),
                    });
                }
            }
            Ok(ConvergenceTrial {
                lmmse_errors,
                variants,
                ledger,
            })
        })?;

    let trials = run.results.len();
    let iters: Vec<f64> = (0..=t_max).map(|t| t as f64).collect();
    let lmmse_total: u64 = run.results.iter().map(|r| r.lmmse_errors).sum();
    let mut curves = Vec::new();
    let mut failures = Vec::new();
    let mut to_lmmse = Vec::new();
    let lmmse_curve = SerCurve::from_counts(
        "lmmse",
        iters.clone(),
        &vec![lmmse_total; t_max + 1],
        trials,
        users,
    );
    let lmmse_ser = lmmse_curve.ser[0];
    for (mi, &method) in det.methods.iter().enumerate() {
        for (vi, proposed) in [(0, false), (1, true)] {
            let k = 2 * mi + vi;
            let name = variant_name(method, proposed);
            let mut errors = vec![0u64; t_max + 1];
            let (mut diverged, mut not_converged) = (0, 0);
            for r in &run.results {
                let v = &r.variants[k];
                for (acc, e) in errors.iter_mut().zip(&v.errors) {
                    *acc += e;
                }
                diverged += v.diverged as usize;
                not_converged += v.not_converged as usize;
            }
            let curve = SerCurve::from_counts(name.clone(), iters.clone(), &errors, trials, users);
            to_lmmse.push(IterationsToReference {
                method: name.clone(),
                iterations: iterations_to_reference(&curve, lmmse_ser),
            });
            failures.push(ConvergenceFailures {
                method: name,
                trials,
                diverged,
                not_converged,
            });
            curves.push(curve);
        }
    }
    curves.push(lmmse_curve);

    let payload = ConvergencePayload {
        snr_db: cfg
            .detection
            .snr_db
            .unwrap_or_else(|| linear_to_db(budget_rho(cfg))),
        curves,
        iterations_to_lmmse: to_lmmse,
        failures,
    };
    let ledger = merged_ledger(run.results.iter().map(|t| &t.ledger));
    Ok(finish(
        cfg,
        Study::Study3,
        started,
        run.trials(),
        run.failures,
        ledger,
        Payload::Convergence(payload),
    ))
}

struct RobustnessTrial {
    /// `[snr point][curve]` error counts.
    errors: Vec<Vec<u64>>,
    ledger: FlopLedger,
}

/// SER against SNR with the detector built from corrupted CSI.
///
/// Each trial draws one channel, one CSI error and one symbol vector, then
/// reuses them at every SNR point with fresh noise. The receive signal comes
/// from the true channel.
pub fn run_case_study_4(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let sc = Scenario::new(cfg)?;
    let det = &cfg.detection;
    let users = cfg.num_users();
    let sweep = &det.snr_sweep_db;

    let mut names = vec!["lmmse".to_string()];
    names.extend(
        det.sweep_conventional_iters
            .iter()
            .map(|t| format!("{}_t{t}", variant_name(Method::Gs, false))),
    );
    names.extend(
        det.sweep_proposed_iters
            .iter()
            .map(|t| format!("{}_t{t}", variant_name(Method::Gs, true))),
    );
    let conv_max = det
        .sweep_conventional_iters
        .iter()
        .copied()
        .max()
        .unwrap_or(1);
    let prop_max = det.sweep_proposed_iters.iter().copied().max().unwrap_or(1);

    let run = monte_carlo(cfg.monte_carlo.trials, cfg.monte_carlo.seed, |_, seed| {
        let mut chan = rician_channel(&cfg.geometry, &sc.layout, &cfg.budget, &cfg.rician, seed)?;
        let mut est = match det.nmse_db {
            Some(nmse) => corrupt_csi(&chan, nmse, seed)?,
            None => chan.clone(),
        };
        let gram = ChannelGram::new(&est.h)?;
        let (sent, x) = draw_symbols(&sc.constellation, users, seed)?;
        let noise = draw_unit_noise(chan.num_antennas(), sweep.len(), seed);
        let mut ledger = FlopLedger::new();
        let mut errors = Vec::with_capacity(sweep.len());
        let zero = CVector::zeros(users);
        let count =
            |v: &CVector| count_symbol_errors(&demodulate(v, &sc.constellation), &sent) as u64;

        for (&snr, v) in sweep.iter().zip(&noise) {
            chan.rho = db_to_linear(snr);
            est.rho = chan.rho;
            let y = receive(&chan, &x, v)?;
            let d = detect(&est, &gram, &y, &sc.partition, &mut ledger)?;
            let conv = iterate_conventional(
                &d.sys,
                &det.iterative(Method::Gs, conv_max),
                &zero,
                &mut ledger,
            )?;
            let prop =
                iterate_preconditioned(&d.pre, &det.iterative(Method::Gs, prop_max), &mut ledger)?;
            let mut row = vec![count(&d.lmmse)];
            row.extend(
                det.sweep_conventional_iters
                    .iter()
                    .map(|&t| count(estimate_at(&conv, &zero, t))),
            );
            row.extend(
                det.sweep_proposed_iters
                    .iter()
                    .map(|&t| count(estimate_at(&prop, d.pre.x_tilde(), t))),
            );
            errors.push(row);
        }
        Ok(RobustnessTrial { errors, ledger })
    })?;

    let trials = run.results.len();
    let curves = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let totals: Vec<u64> = (0..sweep.len())
                .map(|p| run.results.iter().map(|r| r.errors[p][k]).sum())
                .collect();
            SerCurve::from_counts(name.clone(), sweep.clone(), &totals, trials, users)
        })
        .collect();
    let payload = RobustnessPayload {
        nmse_db: det.nmse_db,
        curves,
    };
    let ledger = merged_ledger(run.results.iter().map(|t| &t.ledger));
    Ok(finish(
        cfg,
        Study::Study4,
        started,
        run.trials(),
        run.failures,
        ledger,
        Payload::Robustness(payload),
    ))
}
