//! Acceptance suite: one numbered check per criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test -p geomis --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::{
    check_clique_law, mean_stderr, min_pair_distance_naive, nearest_distance_brute_force, params, point,
    rect_kissing_configuration,
};
use geomis::adversaries::{
    level_graph_gen, random_balls_gen, random_graph_gen, random_rects_gen, random_sized_balls_gen, star_adversary,
    AdversaryConfig,
};
use geomis::experiment::{run_experiment, Algorithm, ExperimentConfig, InstanceSource, THREADS_ENV};
use geomis::geometry::intersection_graph;
use geomis::lattice::{mc_volume_fraction, SampleBox};
use geomis::online::{empirical_ratio, first_fit, FirstFit};
use geomis::oracle::{exact_mis, independent_kissing_number, verify_ratio};
use geomis::randomized::{
    class_count, classify_sizes_by_class, dyadic_class, filter_acceptance_probability, filter_alg, hr_classify_alg,
    Filter, HrClassifyConfig,
};
use geomis::seed::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_star_tightness() -> Outcome {
    for zeta in 1..=12 {
        let out = star_adversary(zeta, &mut FirstFit::new()).map_err(|e| e.to_string())?;
        let ratio = empirical_ratio(out.opt, &out.run);
        ensure(out.run.size() == 1 && out.opt == zeta && ratio == zeta as f64, || {
            format!("ζ={zeta}: alg={} opt={} ratio={ratio}", out.run.size(), out.opt)
        })?;
        let oracle = exact_mis(&out.sequence.graph(), 40).unwrap().size;
        ensure(oracle == zeta, || format!("ζ={zeta}: oracle opt {oracle}"))?;
    }
    Ok("ζ=1..12: alg=1, opt=ζ, ratio=ζ exactly".into())
}

fn c2_first_fit_upper_bound() -> Outcome {
    let probs = [0.1, 0.3, 0.5];
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let n = 5 + (i as usize % 16);
        let s = random_graph_gen(n, probs[i as usize % 3], derive_seed(2, i));
        let run = first_fit(&s).unwrap();
        let check = verify_ratio(&s, &run, 40).unwrap();
        ensure(check.bound_satisfied, || {
            format!("graph {i}: opt {} > ζ {} · alg {}", check.opt, check.zeta, check.alg)
        })?;
        ensure(s.graph().is_dominating(&run.accepted), || {
            format!("graph {i}: accepted set not dominating")
        })?;
        worst = worst.max(check.ratio / check.zeta.max(1) as f64);
    }
    Ok(format!(
        "200 graphs, n in 5..=20, p in {{0.1,0.3,0.5}}; max ratio/ζ = {worst:.3}"
    ))
}

fn c3_level_graphs() -> Outcome {
    for zeta in 2..=8 {
        for seed in 0..100 {
            let s = level_graph_gen(zeta, derive_seed(3, seed)).unwrap();
            let g = s.graph();
            let opt = exact_mis(&g, 40).unwrap().size;
            let ikn = independent_kissing_number(&g, 40).unwrap().zeta;
            let run = first_fit(&s).unwrap();
            let ratio = empirical_ratio(opt, &run);
            ensure(
                opt > zeta && ikn <= zeta && run.size() == 2 && ratio >= (zeta as f64 + 1.0) / 2.0,
                || format!("ζ={zeta} seed {seed}: opt {opt}, ikn {ikn}, alg {}", run.size()),
            )?;
        }
    }
    Ok("ζ=2..8 × 100 seeds: MIS ≥ ζ+1, IKN ≤ ζ, FirstFit accepts 2".into())
}

fn c4_lattice_spacing() -> Outcome {
    let p = params(3, 0.01);
    let got = p.min_pairwise_distance(3).unwrap();
    let expected = (2.005f64 * 2.005 + 12.0).sqrt();
    let naive = min_pair_distance_naive(0.01, 3, 3);
    ensure(got > 4.0 && got < 4.0026, || format!("{got} outside (4, 4.0026)"))?;
    ensure((got - expected).abs() <= 1e-6, || format!("{got} vs {expected}"))?;
    ensure((got - naive).abs() <= 1e-12, || format!("{got} vs exhaustive {naive}"))?;
    ensure((got - 4.002502).abs() <= 1e-6, || format!("{got} vs 4.002502"))?;
    Ok(format!("min distance {got:.9}"))
}

fn c5_closest_point() -> Outcome {
    let p = params(3, 0.01);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut covered = 0;
    for k in 0..10_000 {
        let q: Vec<f64> = (0..3).map(|_| rng.random_range(-25.0..25.0)).collect();
        let (x, _) = p.closest_lattice_point(&point(&q)).unwrap();
        let d = x
            .coords()
            .iter()
            .zip(&q)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let (best, _, _) = nearest_distance_brute_force(0.01, &q);
        worst = worst.max((d - best).abs());
        ensure((d - best).abs() <= 1e-9, || format!("query {k} {q:?}: {d} vs {best}"))?;
        let cov = p.is_covered(&point(&q)).unwrap();
        ensure(cov == (best <= 1.0), || {
            format!("query {k} {q:?}: covered {cov}, nearest {best}")
        })?;
        covered += cov as usize;
    }
    Ok(format!(
        "10^4 queries, max distance error {worst:.1e}, {covered} covered"
    ))
}

fn c6_volume_identity() -> Outcome {
    let p = params(3, 0.01);
    let target = 4.0 * std::f64::consts::PI / 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let origins: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..3).map(|_| rng.random_range(-100.0..100.0)).collect())
        .collect();
    let estimates: Vec<_> = origins
        .par_iter()
        .enumerate()
        .map(|(i, o)| {
            let b = SampleBox::new(&p, point(o)).unwrap();
            mc_volume_fraction(&p, &b, 1_000_000, derive_seed(6, i as u64)).unwrap()
        })
        .collect();
    let mut worst_z: f64 = 0.0;
    for (i, e) in estimates.iter().enumerate() {
        let z = (e.volume() - target).abs() / e.volume_stderr();
        worst_z = worst_z.max(z);
        ensure(z <= 3.0, || format!("box {i}: {} vs {target} ({z:.2}σ)", e.volume()))?;
    }
    let mut worst_pair: f64 = 0.0;
    for (i, w) in estimates.windows(2).enumerate() {
        let sigma = (w[0].volume_stderr().powi(2) + w[1].volume_stderr().powi(2)).sqrt();
        let z = (w[0].volume() - w[1].volume()).abs() / sigma;
        worst_pair = worst_pair.max(z);
        ensure(z <= 3.0, || format!("boxes {i},{}: {:.2}σ apart", i + 1, z))?;
    }
    let mean = estimates.iter().map(|e| e.volume()).sum::<f64>() / 20.0;
    Ok(format!(
        "20 × 10^6 samples, mean {mean:.5} vs 4π/3 = {target:.5}, worst {worst_z:.2}σ, worst pair {worst_pair:.2}σ"
    ))
}

fn c7_acceptance_probability() -> Outcome {
    let p = params(3, 0.01);
    let prob = filter_acceptance_probability(&p);
    ensure((prob - 0.087049).abs() < 5e-7, || format!("closed form {prob}"))?;
    let n = 100_000u64;
    let hits: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(7, i));
            let c: Vec<f64> = (0..3).map(|_| rng.random_range(-40.0..40.0)).collect();
            let mut f = Filter::new(p, rng.random());
            f.cell_of(&point(&c)).unwrap().is_some() as usize
        })
        .sum();
    let rate = hits as f64 / n as f64;
    let sigma = (prob * (1.0 - prob) / n as f64).sqrt();
    let z = (rate - prob).abs() / sigma;
    ensure(z <= 3.0, || format!("rate {rate} vs {prob} ({z:.2}σ)"))?;
    Ok(format!("rate {rate:.6} vs {prob:.6} ({z:.2}σ)"))
}

fn c8_clique_law() -> Outcome {
    let p = params(3, 0.01);
    let results: Vec<Result<(usize, usize), String>> = (0..100u64)
        .into_par_iter()
        .map(|t| {
            let s = random_balls_gen(200, 3, 14.0, derive_seed(8, t)).unwrap();
            let shift = Filter::draw_shift(&p, &mut ChaCha8Rng::seed_from_u64(derive_seed(80, t)));
            let covered = check_clique_law(&s, &p, &shift).map_err(|e| format!("trial {t}: {e}"))?;
            let mut f = Filter::with_shift(p, shift).unwrap();
            let run = geomis::online::run_online(&mut f, &s).unwrap();
            if run.size() != f.occupied().len() || !run.is_valid() {
                return Err(format!(
                    "trial {t}: {} accepted for {} cells",
                    run.size(),
                    f.occupied().len()
                ));
            }
            Ok((covered, run.size()))
        })
        .collect();
    let mut covered = 0;
    let mut accepted = 0;
    for r in results {
        let (c, a) = r?;
        covered += c;
        accepted += a;
    }
    Ok(format!(
        "100 trials × 200 balls: {covered} covered balls in {accepted} clusters, all cliques, no cross edges"
    ))
}

fn c9_filter_expectation() -> Outcome {
    let p = params(3, 0.01);
    let prob = filter_acceptance_probability(&p);
    let mut lines = Vec::new();
    for inst in 0..20u64 {
        let n = 10 + (inst as usize % 21);
        let s = random_balls_gen(n, 3, 7.0, derive_seed(9, inst)).unwrap();
        let opt = exact_mis(&s.graph(), 40).unwrap().size;
        let sizes: Vec<f64> = (0..500u64)
            .into_par_iter()
            .map(|k| filter_alg(&s, p, derive_seed(90 + inst, k)).unwrap().size() as f64)
            .collect();
        let (mean, se) = mean_stderr(&sizes);
        let floor = prob * opt as f64 - 3.0 * se;
        ensure(mean >= floor, || {
            format!("instance {inst} (n={n}): mean {mean} < {floor}")
        })?;
        lines.push(mean / (prob * opt as f64));
    }
    let min = lines.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("20 instances × 500 shifts; min mean/(p·OPT) = {min:.2}"))
}

fn class_zeta_max(s: &geomis::online::ArrivalSequence, m: f64) -> usize {
    (0..class_count(m))
        .map(|j| {
            let sub = s.filtered(|e| dyadic_class(e.payload.as_ref().unwrap().width()) == j);
            independent_kissing_number(&sub.graph(), 40).unwrap().zeta
        })
        .max()
        .unwrap()
        .max(1)
}

fn c10_classify_bound() -> Outcome {
    let m = 8.0;
    let k = class_count(m);
    ensure(k == 4, || format!("{k} classes for M=8"))?;
    let mut tightest = f64::INFINITY;
    for dim in [2, 3] {
        for inst in 0..20u64 {
            let s = random_sized_balls_gen(24, dim, m, 40.0, derive_seed(10 + dim as u64, inst)).unwrap();
            let opt = exact_mis(&s.graph(), 40).unwrap().size;
            let zeta = class_zeta_max(&s, m);
            let total: usize = classify_sizes_by_class(&s, m).unwrap().iter().sum();
            // mean = total / k, bound mean ≥ opt / (ζ k)  ⇔  total · ζ ≥ opt
            ensure(total * zeta >= opt, || {
                format!("d={dim} instance {inst}: Σ={total}, ζ={zeta}, OPT={opt}")
            })?;
            tightest = tightest.min((total * zeta) as f64 / opt.max(1) as f64);
        }
    }
    Ok(format!(
        "d ∈ {{2,3}} × 20 instances; min (mean·ζ·4)/OPT = {tightest:.2}"
    ))
}

fn c11_hr_classify() -> Outcome {
    let m = 5.0;
    let classes = HrClassifyConfig::all_classes(m, 2);
    ensure(classes.len() == 9, || format!("{} classes", classes.len()))?;
    let per_class = 10_000usize;
    let worst: Vec<usize> = classes
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(11, i as u64));
            (0..per_class)
                .map(|_| {
                    let g = intersection_graph(&rect_kissing_configuration(&mut rng, c, m)).unwrap();
                    independent_kissing_number(&g, 64).unwrap().zeta
                })
                .max()
                .unwrap()
        })
        .collect();
    let max = *worst.iter().max().unwrap();
    ensure(max <= 16, || format!("search found a class kissing number {max} > 16"))?;
    let mut tightest = f64::INFINITY;
    for inst in 0..20u64 {
        let s = random_rects_gen(24, 2, m, 16.0, derive_seed(110, inst)).unwrap();
        let opt = exact_mis(&s.graph(), 40).unwrap().size;
        let mut total = 0;
        for c in &classes {
            total += hr_classify_alg(&s, HrClassifyConfig::with_classes(m, c.clone()).unwrap(), 0)
                .unwrap()
                .size();
        }
        // mean = total / 9 ≥ opt / 144  ⇔  16 · total ≥ opt
        ensure(16 * total >= opt, || format!("instance {inst}: Σ={total}, OPT={opt}"))?;
        tightest = tightest.min((16 * total) as f64 / opt.max(1) as f64);
    }
    Ok(format!(
        "{} configurations, largest class kissing number {max}; 20 instances, min 144·mean/OPT = {tightest:.2}",
        per_class * classes.len()
    ))
}

fn c12_reproducibility() -> Outcome {
    let mut configs = vec![
        ExperimentConfig::new(
            Algorithm::Filter,
            InstanceSource::Generator(AdversaryConfig::RandomBalls {
                n: 25,
                dim: 3,
                box_side: 7.0,
            }),
            60,
        ),
        ExperimentConfig::new(
            Algorithm::Classify,
            InstanceSource::Generator(AdversaryConfig::RandomSizedBalls {
                n: 20,
                dim: 2,
                m: 8.0,
                box_side: 30.0,
            }),
            40,
        ),
        ExperimentConfig::new(
            Algorithm::HrClassify,
            InstanceSource::Generator(AdversaryConfig::RandomRects {
                n: 20,
                dim: 2,
                m: 5.0,
                box_side: 15.0,
            }),
            40,
        ),
    ];
    configs[0].base_seed = 12;
    configs[1].m = Some(8.0);
    configs[1].fresh_instance = true;
    configs[2].m = Some(5.0);
    let json = serde_json::to_string(&configs[0]).unwrap();
    configs.push(ExperimentConfig::from_json(&json).unwrap());
    for (i, c) in configs.iter().enumerate() {
        std::env::set_var(THREADS_ENV, "1");
        let a = run_experiment(c).map_err(|e| e.to_string())?.to_csv();
        std::env::set_var(THREADS_ENV, "4");
        let b = run_experiment(c).map_err(|e| e.to_string())?.to_csv();
        std::env::remove_var(THREADS_ENV);
        let d = run_experiment(c).map_err(|e| e.to_string())?.to_csv();
        ensure(a == b && b == d, || format!("config {i}: CSV differs between runs"))?;
    }
    Ok(format!(
        "{} configs × 3 runs (1, 4, default threads): byte-identical CSV",
        configs.len()
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("deterministic tightness (star adversary)", c1_star_tightness),
        ("FirstFit upper bound on random graphs", c2_first_fit_upper_bound),
        ("level graphs", c3_level_graphs),
        ("lattice spacing", c4_lattice_spacing),
        ("closest-point correctness", c5_closest_point),
        ("volume identity", c6_volume_identity),
        ("Filter acceptance probability", c7_acceptance_probability),
        ("Filter clique law", c8_clique_law),
        ("Filter expectation bound", c9_filter_expectation),
        ("Classify bound", c10_classify_bound),
        ("HR-Classify kissing number and bound", c11_hr_classify),
        ("experiment reproducibility", c12_reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
