//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are printed even when cargo captures output.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;

use growtree::bits::BitSource;
use growtree::enumeration::{
    catalan, column_deficits, cumulative_anchor_series, fixed_point_probe, mandelbrot, t_height_table,
    t_table, ProbeConfig, ProbeOutcome,
};
use growtree::oracle::{all_binary_trees, chi_square, trees_with_profile, unreachable_count};
use growtree::profiles::{count_trees, Profile};
use growtree::sampler::{entropy_bound, uniform_tree_traced};
use growtree::sequences::{
    a_gf_check, a_seq, a_seq_meta, b_formula, b_seq, deviation_of, gamma, lambda_upper, s_area_formula,
    s_domain, s_domains, CellSet,
};
use growtree::series::PolySeries;
use growtree::BinaryTree;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const PRINTED_COUNTS: [[u64; 14]; 7] = [
    [1, 2, 4, 12, 32, 104, 328, 1080, 3648, 12544, 43600, 153504, 546272, 1960368],
    [0, 0, 1, 2, 10, 24, 92, 308, 1028, 3584, 12736, 45160, 161152, 581632],
    [0, 0, 0, 0, 0, 4, 8, 40, 176, 584, 2144, 8192, 30720, 112496],
    [0, 0, 0, 0, 0, 0, 1, 2, 10, 84, 282, 1048, 4368, 18224],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 24, 104, 352, 1616],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4, 36, 96],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8],
];

/// Nonzero cells `((n, k), t_{n,2k,4})` of the height-4 table.
const HEIGHT_4_CELLS: [((u64, u64), u64); 24] = [
    ((4, 1), 8),
    ((5, 1), 16),
    ((5, 2), 4),
    ((6, 1), 24),
    ((6, 2), 16),
    ((7, 1), 24),
    ((7, 2), 36),
    ((7, 3), 8),
    ((8, 1), 8),
    ((8, 2), 60),
    ((8, 3), 24),
    ((8, 4), 2),
    ((9, 2), 28),
    ((9, 3), 80),
    ((9, 4), 6),
    ((10, 3), 56),
    ((10, 4), 60),
    ((11, 4), 70),
    ((11, 5), 24),
    ((12, 5), 56),
    ((12, 6), 4),
    ((13, 6), 28),
    ((14, 7), 8),
    ((15, 8), 1),
];

fn count_table() -> Check {
    let start = Instant::now();
    let t = t_table::<BigUint>(14);
    let elapsed = start.elapsed();
    for (row, values) in PRINTED_COUNTS.iter().enumerate() {
        let k = row + 1;
        for (col, &expected) in values.iter().enumerate() {
            let n = col + 1;
            ensure!(
                t.get(n, k) == BigUint::from(expected),
                "t_{{{n},{}}} = {}, table says {expected}",
                2 * k,
                t.get(n, k)
            );
        }
    }
    for n in 1..=14 {
        ensure!(t.max_k(n) <= 7, "column {n} has entries beyond 2k = 14");
    }
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("98 values exact in {elapsed:?}"))
}

fn catalan_identity() -> Check {
    let t = t_table::<BigUint>(20);
    let deficits = column_deficits(&t);
    for n in 1..=20usize {
        // independent closed form binom(2n, n) / (n + 1)
        let closed = growtree::profiles::binomial(2 * n as u128, n as u128) / BigUint::from(n + 1);
        ensure!(catalan::<BigUint>(n) == closed, "C_{n} mismatch");
        let deficit = &deficits[n - 1];
        ensure!(deficit.sign() != num_bigint::Sign::Minus, "column {n} exceeds C_{n}");
        let inactive = if n <= 8 {
            let counted = unreachable_count(n).map_err(|e| e.to_string())?;
            ensure!(
                num_bigint::BigInt::from(counted) == *deficit,
                "oracle finds {counted} inactive trees at n = {n}, formula {deficit}"
            );
            BigUint::from(counted)
        } else {
            deficit.to_biguint().expect("nonnegative")
        };
        ensure!(t.column_sum(n) + inactive == closed, "column {n} + inactive != C_{n}");
    }
    Ok("C_n exact for n <= 20, oracle-confirmed for n <= 8".into())
}

fn height_4_table() -> Check {
    let t = t_height_table::<BigUint>(4);
    let expected: BTreeMap<(u64, u64), BigUint> =
        HEIGHT_4_CELLS.iter().map(|&(cell, v)| (cell, BigUint::from(v))).collect();
    ensure!(
        t.entries() == &expected,
        "height-4 table differs: {} cells computed, 24 expected",
        t.entries().len()
    );
    for h in 1..=7 {
        let support = t_height_table::<BigUint>(h).support();
        ensure!(support == s_domain(h), "support of height {h} differs from S_{h}");
    }
    Ok("24 cells exact; supports equal S_h for h <= 7".into())
}

fn boundaries() -> Check {
    let start = Instant::now();
    for h in 1..=7 {
        let support = t_height_table::<BigUint>(h).support();
        ensure!(support.right_boundary() == gamma(h), "right boundary at h = {h}");
        ensure!(support.upper_boundary() == lambda_upper(h), "upper boundary at h = {h}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "boundary checks took {elapsed:?}");
    let domains = s_domains(12);
    for h in 2..=12u32 {
        let lambda = lambda_upper(h);
        let expected = (1u64 << h) - h as u64;
        ensure!(lambda.len() == expected, "|Lambda_{h}| = {}", lambda.len());
        let domain: &CellSet = &domains[h as usize - 1];
        ensure!(domain.upper_boundary() == lambda, "iterated upper boundary at h = {h}");
        ensure!(
            BigUint::from(domain.len()) == s_area_formula(h),
            "|S_{h}| = {}, formula {}",
            domain.len(),
            s_area_formula(h)
        );
    }
    Ok(format!("h <= 7 in {elapsed:?}; sizes exact for 2 <= h <= 12"))
}

fn sequences() -> Check {
    let t = t_table::<BigUint>(14);
    let a = a_seq(10_000);
    let meta = a_seq_meta(10_000);
    ensure!(a == meta, "bisection and recurrence disagree");
    for n in 1..=14 {
        ensure!(t.max_k(n) as u64 == a.at(n), "max k at n = {n}: {} vs {}", t.max_k(n), a.at(n));
    }
    let b = b_seq(100_000);
    for n in 1..=100_000u64 {
        ensure!(b.at(n as usize) == b_formula(n), "b_{n}");
    }
    ensure!(a_gf_check(512), "generating function check failed");
    let big = 1usize << 20;
    let ratio = a_seq_meta(big).at(big) as f64 / big as f64;
    ensure!((ratio - 0.5).abs() < 1e-3, "a_(2^20) / 2^20 = {ratio}");
    Ok(format!("a_(2^20)/2^20 = {ratio:.6}"))
}

fn mandelbrot_identity() -> Check {
    let z = PolySeries::<BigUint>::monomial(1, 64);
    for h in 0..=10 {
        let lhs = mandelbrot::<BigUint>(h + 1, 64);
        let rhs = &mandelbrot::<BigUint>(h, 64).square() + &z;
        ensure!(lhs == rhs, "M_{} != M_{h}^2 + z", h + 1);
    }
    let t = t_table::<BigUint>(14);
    let anchors = cumulative_anchor_series::<BigUint>(14);
    for n in 1..=14 {
        let weighted: BigUint = (1..=t.max_k(n)).map(|k| t.get(n, k) * BigUint::from(2 * k)).sum();
        ensure!(anchors.coeff(n) == weighted, "anchor series at z^{n}");
    }
    let cfg = ProbeConfig::default();
    for z in [0.0, 0.1, 0.2, 0.24] {
        ensure!(
            matches!(fixed_point_probe(z, cfg), ProbeOutcome::Converged { .. }),
            "probe at {z}: {}",
            fixed_point_probe(z, cfg)
        );
    }
    for z in [0.26, 0.3] {
        ensure!(
            matches!(fixed_point_probe(z, cfg), ProbeOutcome::Diverged { .. }),
            "probe at {z}: {}",
            fixed_point_probe(z, cfg)
        );
    }
    Ok("recursion exact to z^64 for h <= 10; probes as expected".into())
}

/// Every profile `(0, l_1, .., l_h)` with last entry positive and at most
/// `max_leaves` leaves, plus `(1)`. A tree with `L` leaves has height below
/// `L`, so `h < max_leaves` loses nothing.
fn shaped_profiles(max_leaves: u64) -> Vec<Profile> {
    fn extend(prefix: &mut Vec<u64>, left: u64, max_len: usize, out: &mut Vec<Profile>) {
        if prefix.len() > 1 && prefix[prefix.len() - 1] > 0 {
            out.push(Profile::new(prefix.clone()).expect("shaped"));
        }
        if prefix.len() == max_len {
            return;
        }
        for l in 0..=left {
            prefix.push(l);
            extend(prefix, left - l, max_len, out);
            prefix.pop();
        }
    }
    let mut out = vec![Profile::new(vec![1]).expect("shaped")];
    extend(&mut vec![0], max_leaves, max_leaves as usize, &mut out);
    out
}

const MAX_PROFILE_LEAVES: u64 = 10;

fn profile_counting() -> Check {
    let mut from_oracle: HashMap<Profile, u64> = HashMap::new();
    for size in 1..=MAX_PROFILE_LEAVES as usize {
        let mut total = BigUint::zero();
        let mut seen: BTreeMap<Profile, u64> = BTreeMap::new();
        for t in all_binary_trees(size).map_err(|e| e.to_string())? {
            *seen.entry(t.profile()).or_default() += 1;
        }
        for (p, brute) in seen {
            let formula = count_trees(&p).map_err(|e| format!("{p}: {e}"))?;
            ensure!(formula == BigUint::from(brute), "profile {p}: {formula} vs {brute}");
            total += formula;
            from_oracle.insert(p, brute);
        }
        ensure!(total == catalan::<BigUint>(size - 1), "sum over {size}-leaf profiles");
    }
    let candidates = shaped_profiles(MAX_PROFILE_LEAVES);
    for p in &candidates {
        let realized = from_oracle.contains_key(p);
        ensure!(p.is_valid() == realized, "profile {p}: valid = {}, realized = {realized}", p.is_valid());
    }
    Ok(format!(
        "{} realized profiles exact; Kraft <=> realizable on {} candidate profiles",
        from_oracle.len(),
        candidates.len()
    ))
}

fn sampler_correctness() -> Check {
    let mut tested = 0;
    let mut worst: f64 = 0.0;
    for p in shaped_profiles(8) {
        if !p.is_valid() {
            continue;
        }
        let count = count_trees(&p).map_err(|e| e.to_string())?;
        if count > BigUint::from(60u32) {
            continue;
        }
        let support = trees_with_profile(&p).map_err(|e| e.to_string())?;
        ensure!(BigUint::from(support.len()) == count, "support size of {p}");
        let index: HashMap<&BinaryTree, usize> = support.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let draws = 100 * support.len().max(2) as u64;
        let mut observed = vec![0u64; support.len()];
        let mut src = BitSource::from_seed(0x5eed ^ tested);
        for _ in 0..draws {
            let s = uniform_tree_traced(&p, &mut src).map_err(|e| e.to_string())?;
            ensure!(s.tree.profile() == p, "sample of {p} has profile {}", s.tree.profile());
            let i = index.get(&s.tree).ok_or_else(|| format!("sample of {p} outside the support"))?;
            observed[*i] += 1;
        }
        ensure!(observed.iter().all(|&c| c > 0), "{p}: some tree never sampled: {observed:?}");
        if observed.len() >= 2 {
            let chi = chi_square(&observed).map_err(|e| e.to_string())?;
            ensure!(chi.pass, "{p}: chi-square {} >= {}", chi.statistic, chi.threshold);
            worst = worst.max(chi.statistic / chi.threshold);
        }
        tested += 1;
    }
    Ok(format!("{tested} profiles; largest statistic/threshold = {worst:.3}"))
}

fn entropy_accounting() -> Check {
    let mut report = Vec::new();
    for text in ["0,1,2", "0,0,2,4", "0,1,0,4"] {
        let p: Profile = text.parse().map_err(|e: growtree::Error| e.to_string())?;
        let bound = entropy_bound(&p).map_err(|e| e.to_string())? + 3.0;
        let mut src = BitSource::from_seed(2024);
        let mut bits = 0u64;
        for _ in 0..10_000 {
            bits += uniform_tree_traced(&p, &mut src).map_err(|e| e.to_string())?.bits_consumed;
        }
        let mean = bits as f64 / 10_000.0;
        ensure!(mean <= bound, "({text}): mean {mean} bits > {bound}");
        report.push(format!("({text}) {mean:.3}"));
    }
    for text in ["1", "0,2", "0,0,4", "0,0,0,8", "0,0,0,0,16"] {
        let p: Profile = text.parse().map_err(|e: growtree::Error| e.to_string())?;
        let mut src = BitSource::from_seed(1);
        for _ in 0..100 {
            let s = uniform_tree_traced(&p, &mut src).map_err(|e| e.to_string())?;
            ensure!(s.bits_consumed == 0, "({text}) consumed {} bits", s.bits_consumed);
        }
    }
    let p: Profile = "0,0,2,4".parse().map_err(|e: growtree::Error| e.to_string())?;
    let run = |seed| {
        let mut src = BitSource::from_seed(seed);
        (0..500)
            .map(|_| {
                let s = uniform_tree_traced(&p, &mut src).expect("valid profile");
                (s.tree.to_json(), s.bits_consumed)
            })
            .collect::<Vec<_>>()
    };
    ensure!(run(99) == run(99), "same seed gave different samples");
    Ok(format!("mean bits {}", report.join(", ")))
}

fn linearity() -> Check {
    let mut ratios = Vec::new();
    for h in 6..=12u32 {
        let mut levels = vec![0u64; h as usize + 1];
        levels[h as usize] = 1 << h;
        let p = Profile::new(levels).map_err(|e| e.to_string())?;
        let s = uniform_tree_traced(&p, &mut BitSource::from_seed(h as u64)).map_err(|e| e.to_string())?;
        let nodes = s.tree.node_count() as u64;
        let internal = s.tree.internal_count() as u64;
        let leaves = s.tree.leaf_count() as u64;
        ensure!(s.steps == 2 * internal + leaves, "h = {h}: {} steps for {nodes} nodes", s.steps);
        ratios.push(s.steps as f64 / (1u64 << h) as f64);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    for (h, r) in (6..).zip(&ratios) {
        ensure!((r - mean).abs() <= 0.1 * mean, "h = {h}: steps/2^h = {r}, mean {mean}");
    }
    Ok(format!("steps/2^h in [{:.4}, {:.4}]", ratios[0], ratios[ratios.len() - 1]))
}

fn scaling_limit() -> Check {
    let domains = s_domains(14);
    let devs: Vec<f64> = (4..=14u32).map(|h| deviation_of(&domains[h as usize - 1], h)).collect();
    for (i, pair) in devs.windows(2).enumerate() {
        ensure!(
            pair[1] <= 1.05 * pair[0],
            "deviation rises from {} (h = {}) to {}",
            pair[0],
            i + 4,
            pair[1]
        );
    }
    let last = *devs.last().expect("nonempty");
    ensure!(last < 0.05, "deviation(14) = {last}");
    Ok(format!("deviation(4) = {:.4}, deviation(14) = {last:.4}", devs[0]))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Count table reproduction", count_table),
        ("Catalan identity", catalan_identity),
        ("Height-4 table reproduction", height_4_table),
        ("Boundary formulas", boundaries),
        ("Sequence coherence", sequences),
        ("Mandelbrot identity", mandelbrot_identity),
        ("Profile counting", profile_counting),
        ("Sampler correctness", sampler_correctness),
        ("Entropy accounting", entropy_accounting),
        ("Linearity", linearity),
        ("Scaling-limit diagnostic", scaling_limit),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {reason} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
