//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! fails the test binary if any criterion fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    brute_force_gae, chi_square, chi_square_critical_999, energy, integrate_two_body, lambert, relative_error,
    report, V3,
};
use helios::astro::{angular_momentum, kepler_propagate, Mission, MissionConfig};
use helios::config::{worker_threads, RunConfig};
use helios::env::{
    read_dv_schedule, write_dv_schedule, ConstraintReport, ImpulseCommand, SpacecraftState, TransferEnv,
    FINAL_TOLERANCE,
};
use helios::eval::{
    extract_reference_trajectory, mte_sweep, replay_schedule, run_campaign, summarize, write_episodes_csv,
    write_sweep_csv, CampaignOptions, EpisodeRecord,
};
use helios::policy::{log_prob, NetworkSpec, PolicyParams};
use helios::ppo::{
    collect_rollouts, compute_gae, ppo_objective, ppo_update, train_to_dir, Adam, HyperParams, ObjectiveCoeffs,
    RolloutBuffer, Trainer, Transition,
};
use helios::rng::{derive_stream, RngStream, StreamPurpose};
use helios::uncertainty::{mte_schedule, MteSchedule, Mode, Perturbations, UncertaintyConfig};

fn unit_vector(s: &mut RngStream) -> V3 {
    V3::new(s.standard_normal(), s.standard_normal(), s.standard_normal()).normalize()
}

fn criterion_1() -> bool {
    let start = Instant::now();
    let mission = Mission::default();
    let dt = mission.segment_time;
    let mut s = derive_stream(101, 0, 0);
    let (mut worst_state, mut worst_invariant) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let rhat = unit_vector(&mut s);
        let r = rhat * (0.5 + 2.0 * s.uniform());
        let t = (unit_vector(&mut s) - rhat * unit_vector(&mut s).dot(&rhat)).normalize();
        let t = (t - rhat * t.dot(&rhat)).normalize();
        let alpha = (s.uniform() - 0.5) * 2.0 * 60f64.to_radians();
        let speed = (1.0 / r.norm()).sqrt() * (0.6 + 0.7 * s.uniform());
        let v = (t * alpha.cos() + rhat * alpha.sin()) * speed;
        assert!(energy(&r, &v, 1.0) < 0.0);

        let (rk, vk) = kepler_propagate(&r, &v, dt, 1.0).expect("elliptic state propagates");
        let (ro, vo) = integrate_two_body(&r, &v, dt, 1.0, 1e-13);
        worst_state = worst_state
            .max((rk - ro).norm() / ro.norm())
            .max((vk - vo).norm() / vo.norm());
        let de = ((energy(&rk, &vk, 1.0) - energy(&r, &v, 1.0)) / energy(&r, &v, 1.0)).abs();
        let h0 = angular_momentum(&r, &v);
        let dh = (angular_momentum(&rk, &vk) - h0).norm() / h0.norm();
        worst_invariant = worst_invariant.max(de).max(dh);
    }
    let elapsed = start.elapsed();
    let pass = worst_state <= 1e-9 && worst_invariant <= 1e-10 && elapsed <= Duration::from_secs(60);
    report(
        1,
        "propagation oracle equivalence",
        pass,
        &format!(
            "max state rel err {worst_state:.2e} (<= 1e-9), max energy/momentum drift {worst_invariant:.2e} (<= 1e-10), {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> bool {
    let mission = Mission::default();
    let mut env = TransferEnv::deterministic(mission.clone());
    env.reset(derive_stream(0, 0, 0));
    while !env.is_done() {
        env.step(&ImpulseCommand::zero()).unwrap();
    }
    let pos_env = env.report().unwrap().pos_err;
    let (r_coast, _) = integrate_two_body(&mission.r_earth, &mission.v_earth, mission.transfer_time, 1.0, 1e-13);
    let pos_oracle = (r_coast - mission.r_mars).norm() / mission.r_mars.norm();
    let coast_rel = (pos_env - pos_oracle).abs() / pos_oracle;

    // Penalty-free episodes: in-bound impulses and a tolerance loose enough
    // that the terminal term vanishes.
    let mut s = derive_stream(202, 0, 0);
    let mut identity_holds = true;
    for ep in 0..200 {
        let mut env = TransferEnv::deterministic(mission.clone());
        env.set_tolerance(1e3);
        env.reset(derive_stream(202, 1, ep));
        let mut total = 0.0;
        while !env.is_done() {
            let dv = unit_vector(&mut s) * env.max_dv() * 0.999 * s.uniform();
            let step = env.step(&ImpulseCommand::new(dv)).unwrap();
            assert_eq!(step.info.terms.dv_violation, 0.0);
            total += step.reward;
        }
        let m_f = env.terminal().unwrap().final_state.m;
        identity_holds &= total == -(1.0 - m_f);
    }
    let table_row: f64 = -(1000.0 - 600.23) / 1000.0;
    let table_ok = (table_row * 1e4).round() / 1e4 == -0.3998;

    let pass = coast_rel <= 1e-9 && identity_holds && table_ok;
    report(
        2,
        "ballistic coast consistency",
        pass,
        &format!(
            "coast miss {pos_env:.12} vs oracle {pos_oracle:.12} (rel {coast_rel:.1e}); J = -(m0-m_f)/m0 exact on 200 episodes: {identity_holds}; m_f 600.23 kg -> J {table_row:.5}"
        ),
    )
}

fn criterion_3() -> bool {
    let start = Instant::now();
    let mut s = derive_stream(303, 0, 0);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = 1 + s.index(64);
        let rewards: Vec<f64> = (0..n).map(|_| s.standard_normal()).collect();
        let values: Vec<f64> = (0..=n).map(|_| s.standard_normal()).collect();
        let dones: Vec<bool> = (0..n).map(|_| s.uniform() < 0.1).collect();
        let gamma = 0.5 + 0.5 * s.uniform();
        let lambda = 0.5 + 0.5 * s.uniform();
        let (adv, _) = compute_gae(&rewards, &values, &dones, gamma, lambda).unwrap();
        let oracle = brute_force_gae(&rewards, &values, &dones, gamma, lambda);
        for (a, b) in adv.iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed <= Duration::from_secs(10);
    report(
        3,
        "GAE oracle",
        pass,
        &format!("max |gae - double sum| {worst:.2e} over 10000 sequences, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn perturbed_params(spec: &NetworkSpec, seed: u64) -> PolicyParams {
    let mut p = PolicyParams::init(spec, seed).unwrap();
    let mut s = RngStream::derive(seed, 1, 0, StreamPurpose::Init);
    let flat: Vec<f64> = p.flatten().iter().map(|x| x + 0.3 * s.standard_normal()).collect();
    p.set_flat(&flat).unwrap();
    p
}

/// A batch drawn from `old` and scored against parameters near it.
fn gradient_batch(spec: &NetworkSpec, seed: u64, zero_advantage: bool) -> (PolicyParams, Vec<Transition>) {
    let old = perturbed_params(spec, seed);
    let mut s = derive_stream(seed, 9, 0);
    let transitions = (0..16)
        .map(|_| {
            let obs: [f64; 8] = std::array::from_fn(|_| s.standard_normal());
            let (mean, _) = old.forward(&obs).unwrap();
            let dist = old.distribution(mean);
            let (a, lp) = dist.sample(&mut s);
            Transition {
                obs,
                action: [a[0], a[1], a[2]],
                log_prob: lp,
                value: 0.0,
                reward: 0.0,
                done: false,
                advantage: if zero_advantage { 0.0 } else { s.standard_normal() },
                return_target: s.standard_normal(),
            }
        })
        .collect();
    let mut current = old.clone();
    let mut s2 = RngStream::derive(seed, 2, 0, StreamPurpose::Init);
    let flat: Vec<f64> = current.flatten().iter().map(|x| x + 0.05 * s2.standard_normal()).collect();
    current.set_flat(&flat).unwrap();
    (current, transitions)
}

fn fd_gradient(params: &PolicyParams, batch: &[Transition], coeffs: ObjectiveCoeffs) -> Vec<f64> {
    let idx: Vec<usize> = (0..batch.len()).collect();
    let base = params.flatten();
    let h = 1e-6;
    let mut probe = params.clone();
    (0..base.len())
        .map(|i| {
            let mut x = base.clone();
            x[i] = base[i] + h;
            probe.set_flat(&x).unwrap();
            let plus = ppo_objective(&probe, batch, &idx, coeffs).unwrap().objective;
            x[i] = base[i] - h;
            probe.set_flat(&x).unwrap();
            let minus = ppo_objective(&probe, batch, &idx, coeffs).unwrap().objective;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

fn criterion_4() -> bool {
    let start = Instant::now();
    let spec = NetworkSpec {
        hidden: vec![6, 5],
        ..NetworkSpec::default()
    };
    // (term, zero advantages, c1, c2)
    let cases = [
        ("J_clip", false, 0.0, 0.0),
        ("H", true, 1.0, 0.0),
        ("S", true, 0.0, 1.0),
        ("J_ppo", false, 0.5, 0.01),
    ];
    let mut worst = vec![0.0f64; cases.len()];
    let mut clipped_seen = 0.0;
    for trial in 0..10 {
        for (c, &(_, zero_adv, c1, c2)) in cases.iter().enumerate() {
            let (params, batch) = gradient_batch(&spec, 400 + trial, zero_adv);
            let coeffs = ObjectiveCoeffs { clip_eps: 0.2, c1, c2 };
            let idx: Vec<usize> = (0..batch.len()).collect();
            let out = ppo_objective(&params, &batch, &idx, coeffs).unwrap();
            clipped_seen += out.clip_fraction;
            let analytic = out.grads.flatten();
            let numeric = fd_gradient(&params, &batch, coeffs);
            worst[c] = worst[c].max(relative_error(&analytic, &numeric));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst.iter().all(|w| *w <= 1e-4) && clipped_seen > 0.0 && elapsed <= Duration::from_secs(60);
    let detail = cases
        .iter()
        .zip(&worst)
        .map(|((name, ..), w)| format!("{name} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        4,
        "gradient correctness",
        pass,
        &format!("max relative error vs central differences: {detail} (<= 1e-4), {:.1} s", elapsed.as_secs_f64()),
    )
}

fn criterion_5() -> bool {
    let params = PolicyParams::init(&NetworkSpec::default(), 5).unwrap();
    let hp = HyperParams {
        n_env: 4,
        n_b: 2,
        ..HyperParams::default()
    };
    let mission = Mission::default();
    let pert = Perturbations::new(&UncertaintyConfig::default().with_mode(Mode::St), &mission.scales).unwrap();
    let mut envs = vec![TransferEnv::new(mission, pert); hp.n_env];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let mut buffer = collect_rollouts(&params, &mut envs, &hp, 55, 0, &pool).unwrap();

    let mut worst_ratio = 0.0f64;
    for t in buffer.transitions() {
        let (mean, _) = params.forward(&t.obs).unwrap();
        let ratio = (log_prob(&mean, &params.log_std, &t.action) - t.log_prob).exp();
        worst_ratio = worst_ratio.max((ratio - 1.0).abs());
    }

    // Replay the first minibatch of the update with the same shuffle stream.
    let n = buffer.len();
    let mut order: Vec<usize> = (0..n).collect();
    RngStream::derive(55, 0, 0, StreamPurpose::Minibatch).shuffle(&mut order);
    let first = &order[..n.div_ceil(hp.n_b)];
    let mean_adv = first.iter().map(|&i| buffer.transitions()[i].advantage).sum::<f64>() / first.len() as f64;
    let mut p = params.clone();
    let mut adam = Adam::new(p.len(), 0.9, 0.999, 1e-8);
    let mut stream = RngStream::derive(55, 0, 0, StreamPurpose::Minibatch);
    let stats = ppo_update(&mut p, &mut adam, &mut buffer, &hp, 2.5e-4, 0.3, &mut stream).unwrap();
    let clip_gap = (stats.initial_clip_term - mean_adv).abs();

    let pass = worst_ratio <= 1e-12 && clip_gap <= 1e-10;
    report(
        5,
        "PPO ratio invariant",
        pass,
        &format!("max |ratio - 1| {worst_ratio:.1e} over {n} transitions; |J_clip - mean advantage| {clip_gap:.1e}"),
    )
}

fn sample_std(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn criterion_6() -> bool {
    const N: usize = 1_000_000;
    let mission = Mission::default();
    let cfg = UncertaintyConfig::default();
    let pert = Perturbations::new(&cfg.clone().with_mode(Mode::Ctr), &mission.scales).unwrap();
    let sc = &mission.scales;
    let mut s = derive_stream(606, 0, 0);

    let (mut r_st, mut v_st, mut r_obs, mut v_obs) = (vec![], vec![], vec![], vec![]);
    for _ in 0..N {
        let (dr, dv) = pert.sample_state_noise(&mut s);
        r_st.push(sc.length_to_km(dr.x));
        v_st.push(sc.speed_to_km_s(dv.y));
        let (dr, dv) = pert.sample_obs_noise(&mut s);
        r_obs.push(sc.length_to_km(dr.z));
        v_obs.push(sc.speed_to_km_s(dv.x));
    }
    // Executed impulse (1 + du) A a: a = x-hat exposes du, psi and theta,
    // a = z-hat exposes phi.
    let (mut du, mut psi, mut theta, mut phi) = (vec![], vec![], vec![], vec![]);
    for _ in 0..N {
        let ux = pert.control_execution(&V3::x(), &mut s);
        let g = ux.x;
        du.push(g - 1.0);
        psi.push((ux.y / g).to_degrees());
        theta.push((-ux.z / g).to_degrees());
        let uz = pert.control_execution(&V3::z(), &mut s);
        phi.push((-uz.y / uz.z).to_degrees());
    }
    let checks = [
        ("sigma_r state", sample_std(&r_st), cfg.sigma_r),
        ("sigma_v state", sample_std(&v_st), cfg.sigma_v),
        ("sigma_r obs", sample_std(&r_obs), cfg.sigma_r),
        ("sigma_v obs", sample_std(&v_obs), cfg.sigma_v),
        ("sigma_phi", sample_std(&phi), cfg.sigma_phi),
        ("sigma_theta", sample_std(&theta), cfg.sigma_theta),
        ("sigma_psi", sample_std(&psi), cfg.sigma_psi),
        ("sigma_u", sample_std(&du), cfg.sigma_u),
    ];
    let sigmas_ok = checks.iter().all(|(_, got, want)| ((got - want) / want).abs() <= 0.01);
    let worst_sigma = checks.iter().map(|(_, g, w)| ((g - w) / w).abs()).fold(0.0, f64::max);

    let mut counts = [0u64; 3];
    let mut starts = [0u64; 40];
    let mut ms = derive_stream(607, 0, 0);
    for _ in 0..100_000 {
        let sched = mte_schedule(&mut ms, 40, cfg.p_mte, cfg.n_mte, true, false);
        let ev = sched.events[0];
        counts[ev.duration - 1] += 1;
        starts[ev.start] += 1;
    }
    let chi_dur = chi_square(&counts, &[0.9, 0.09, 0.01]);
    let chi_start = chi_square(&starts, &[1.0 / 40.0; 40]);
    let mte_ok = chi_dur <= chi_square_critical_999(2) && chi_start <= chi_square_critical_999(39);

    report(
        6,
        "uncertainty-model statistics",
        sigmas_ok && mte_ok,
        &format!(
            "worst sigma deviation {:.3}% (<= 1%); duration counts {counts:?} chi2 {chi_dur:.2} (<= 13.82); start chi2 {chi_start:.1} (<= 72.06)",
            100.0 * worst_sigma
        ),
    )
}

struct PolicyScore {
    mean_return: f64,
    mean_pos_err: f64,
    reference_pos_err: f64,
}

fn score(params: &PolicyParams, hp: &HyperParams, mission: &Mission) -> PolicyScore {
    let mut envs = vec![TransferEnv::deterministic(mission.clone()); hp.n_env];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads(hp.n_env))
        .build()
        .unwrap();
    // Held-out episode streams, never used in training.
    let buffer: RolloutBuffer = collect_rollouts(params, &mut envs, hp, 0xACCE_55ED, 0, &pool).unwrap();
    let n = buffer.episodes.len() as f64;
    PolicyScore {
        mean_return: buffer.episodes.iter().map(|e| e.undiscounted_return).sum::<f64>() / n,
        mean_pos_err: buffer.episodes.iter().map(|e| e.pos_err).sum::<f64>() / n,
        reference_pos_err: extract_reference_trajectory(params, mission).unwrap().report.pos_err,
    }
}

fn criterion_7() -> bool {
    let start = Instant::now();
    let config = RunConfig::default();
    assert_eq!(config.hyper.total_steps, 300_000);
    let mission = Mission::new(config.mission.clone()).unwrap();
    let untrained = PolicyParams::init(&config.network, config.seed).unwrap();
    let mut trainer = Trainer::new(&config, worker_threads(config.hyper.n_env)).unwrap();
    assert_eq!(trainer.params(), &untrained);
    trainer.run(|_| Ok(())).unwrap();
    let trained = trainer.best().expect("at least one update").params.clone();

    let before = score(&untrained, &config.hyper, &mission);
    let after = score(&trained, &config.hyper, &mission);
    let ref_factor = before.reference_pos_err / after.reference_pos_err;
    let mc_factor = before.mean_pos_err / after.mean_pos_err;
    let elapsed = start.elapsed();
    let pass = after.mean_return > before.mean_return
        && ref_factor >= 10.0
        && mc_factor >= 10.0
        && elapsed <= Duration::from_secs(30 * 60);
    report(
        7,
        "training smoke",
        pass,
        &format!(
            "{} steps; mean return {:.4} -> {:.4}; mean pos_err {:.3e} -> {:.3e} ({mc_factor:.1}x); reference pos_err {:.3e} -> {:.3e} ({ref_factor:.1}x); {:.0} s",
            trainer.steps(),
            before.mean_return,
            after.mean_return,
            before.mean_pos_err,
            after.mean_pos_err,
            before.reference_pos_err,
            after.reference_pos_err,
            elapsed.as_secs_f64()
        ),
    )
}

fn dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
        out.push((rel, fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            files.extend(walk(&path));
        } else {
            files.push(path);
        }
    }
    files
}

fn criterion_8() -> bool {
    let mut cfg = RunConfig::default();
    cfg.hyper.n_env = 3;
    cfg.hyper.n_b = 2;
    cfg.hyper.n_opt = 3;
    cfg.hyper.total_steps = 3 * cfg.hyper.rollout_steps(40);
    cfg.uncertainty.mode = Mode::Mte2;
    cfg.seed = 88;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    train_to_dir(&cfg, a.path(), 1).unwrap();
    train_to_dir(&cfg, b.path(), 3).unwrap();
    let train_same = dir_bytes(a.path()) == dir_bytes(b.path());

    let params = helios::policy::load_params(a.path().join("checkpoints/best.json")).unwrap();
    let mission = Mission::default();
    let campaign = |threads: usize| {
        let mut bytes = Vec::new();
        let uc = UncertaintyConfig::default().with_mode(Mode::St);
        let opts = CampaignOptions {
            threads,
            ..CampaignOptions::default()
        };
        let recs = run_campaign(&params, &mission, &uc, 40, 9, &opts).unwrap();
        let summary = summarize(&recs, FINAL_TOLERANCE).unwrap();
        bytes.extend(serde_json::to_vec(&summary).unwrap());
        write_episodes_csv(&mut bytes, &recs, FINAL_TOLERANCE).unwrap();
        write_sweep_csv(&mut bytes, &mte_sweep(&params, &mission, 0..40).unwrap()).unwrap();
        bytes
    };
    let eval_same = campaign(1) == campaign(4);

    report(
        8,
        "reproducibility",
        train_same && eval_same,
        &format!("training run directories identical across thread counts: {train_same}; campaign summary, episodes and sweep identical: {eval_same}"),
    )
}

/// A feasible rendezvous built from an independent Lambert solution: leave
/// Earth on a Lambert arc to the point from which a ballistic coast over the
/// last segment ends exactly at Mars' state, and join that coast at node N-1.
fn lambert_schedule(mission: &Mission) -> Vec<V3> {
    let n = mission.segments;
    let dt = mission.segment_time;
    let (r_b, v_b) = integrate_two_body(&mission.r_mars, &mission.v_mars, -dt, 1.0, 1e-14);
    let (v1, v2) = lambert(&mission.r_earth, &r_b, mission.transfer_time - dt, 1.0);
    let mut schedule = vec![V3::zeros(); n];
    schedule[0] = v1 - mission.v_earth;
    schedule[n - 1] = v_b - v2;
    schedule
}

fn synthetic_record(pos_err: f64, vel_err: f64) -> EpisodeRecord {
    let state = SpacecraftState {
        r: V3::zeros(),
        v: V3::zeros(),
        m: 0.6,
        k: 40,
    };
    EpisodeRecord {
        seed: (0, 0, 0),
        rows: Vec::new(),
        final_state: state,
        report: ConstraintReport {
            pos_err,
            vel_err,
            m_f_kg: 600.0,
            dv_violations: Vec::new(),
        },
        tolerance: FINAL_TOLERANCE,
        total_return: -0.4,
        mte: MteSchedule::empty(40),
    }
}

fn criterion_9() -> bool {
    let mission = Mission::new(MissionConfig::default()).unwrap();
    let schedule = lambert_schedule(&mission);
    let direct = replay_schedule(&mission, &schedule).unwrap();

    // Round trip through the physical-unit schedule file.
    let mut csv = Vec::new();
    write_dv_schedule(&mut csv, &schedule, &mission.scales).unwrap();
    let from_file = read_dv_schedule(csv.as_slice(), mission.segments, &mission.scales).unwrap();
    let replayed = replay_schedule(&mission, &from_file).unwrap();
    let summary = summarize(&[direct.clone(), replayed.clone()], FINAL_TOLERANCE).unwrap();
    let replay_ok = summary.success_rate == 100.0;

    let mut s = derive_stream(909, 0, 0);
    let mut recount_ok = true;
    for _ in 0..2000 {
        let n = 1 + s.index(30);
        let recs: Vec<EpisodeRecord> = (0..n)
            .map(|_| synthetic_record(10f64.powf(-5.0 + 4.0 * s.uniform()), 10f64.powf(-5.0 + 4.0 * s.uniform())))
            .collect();
        let eps = if s.uniform() < 0.2 {
            recs[s.index(n)].report.pos_err
        } else {
            10f64.powf(-5.0 + 4.0 * s.uniform())
        };
        let brute = recs
            .iter()
            .filter(|r| r.report.pos_err <= eps && r.report.vel_err <= eps)
            .count();
        let summary = summarize(&recs, eps).unwrap();
        recount_ok &= summary.successes == brute && summary.success_rate == 100.0 * brute as f64 / n as f64;
    }

    report(
        9,
        "Monte Carlo harness",
        replay_ok && recount_ok,
        &format!(
            "Lambert schedule replay pos_err {:.2e}, vel_err {:.2e}, SR {}% (file round trip pos_err {:.2e}); success recounts agree on 2000 random campaigns: {recount_ok}",
            direct.report.pos_err, direct.report.vel_err, summary.success_rate, replayed.report.pos_err
        ),
    )
}

fn main() {
    let criteria: [(usize, fn() -> bool); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let only: Vec<usize> = std::env::var("HELIOS_CRITERIA")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(true) => {}
            Ok(false) => failed.push(id),
            Err(_) => {
                report(id, "criterion", false, "panicked");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
