//! Reference goldens and property runners shared by the integration targets.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use permparity::group_algebra::generalized_symmetrizer;
use permparity::partition::{dim_sn, dim_sud, enumerate_syt, partitions_of, ssyt_count_by_content};
use permparity::perm::factorial;
use permparity::state::{Ket, StateVector};
use permparity::{compose, CharacterTable, ClassLabel, Cyclotomic, IrrepLabel, Partition, Permutation};

pub const PROPERTY_CASES: u32 = 1000;
pub const PROPERTY_SEED: [u8; 32] = *b"permparity-property-suite-seed-1";

pub fn part(s: &str) -> Partition {
    s.parse().unwrap()
}

pub fn int(k: i64) -> Cyclotomic {
    Cyclotomic::from_integer(k)
}

pub fn sqrt(k: i64) -> Cyclotomic {
    Cyclotomic::from_sqrt_integer(k).unwrap()
}

pub fn state(d: usize, terms: &[(&str, Cyclotomic)]) -> StateVector {
    let n = terms[0].0.len();
    StateVector::from_exact_terms(n, d, terms.iter().map(|(k, c)| (Ket::parse(k, d).unwrap(), c.clone()))).unwrap()
}

pub fn three_qubit() -> StateVector {
    let z = Cyclotomic::zeta(3);
    state(2, &[("011", int(1)), ("101", z.clone()), ("110", z.pow(2))])
}

pub fn m4() -> StateVector {
    let z = Cyclotomic::zeta(3);
    let z2 = z.pow(2);
    state(
        2,
        &[
            ("0011", int(1)),
            ("1100", int(1)),
            ("0101", z.clone()),
            ("1010", z),
            ("0110", z2.clone()),
            ("1001", z2),
        ],
    )
}

pub fn four_qutrit() -> StateVector {
    let r2 = sqrt(2);
    let m = -&r2;
    state(
        3,
        &[
            ("1000", int(1)),
            ("0100", int(1)),
            ("0010", int(1)),
            ("0001", int(-3)),
            ("0120", r2.clone()),
            ("0210", m.clone()),
            ("1020", m.clone()),
            ("1200", r2.clone()),
            ("2010", r2.clone()),
            ("2100", m),
        ],
    )
}

pub fn five_qutrit() -> StateVector {
    let r5 = sqrt(5);
    let m5 = -&r5;
    state(
        3,
        &[
            ("00012", int(3)),
            ("00021", int(-3)),
            ("00102", int(-1)),
            ("00120", int(1)),
            ("00201", int(1)),
            ("00210", int(-1)),
            ("01002", int(-1)),
            ("01020", int(1)),
            ("10002", int(-1)),
            ("10020", int(1)),
            ("02001", int(1)),
            ("02010", int(-1)),
            ("20001", int(1)),
            ("20010", int(-1)),
            ("01200", r5.clone()),
            ("02100", m5.clone()),
            ("10200", m5.clone()),
            ("12000", r5.clone()),
            ("20100", r5.clone()),
            ("21000", m5),
        ],
    )
}

/// A reference character table: class labels, then one row per irrep.
pub struct ReferenceTable {
    pub name: &'static str,
    pub classes: &'static [&'static str],
    pub rows: &'static [(&'static str, &'static [&'static str])],
}

pub const S3: ReferenceTable = ReferenceTable {
    name: "S3",
    classes: &["[1^3]", "[2,1]", "[3]"],
    rows: &[
        ("[3]", &["1", "1", "1"]),
        ("[1^3]", &["1", "-1", "1"]),
        ("[2,1]", &["2", "0", "-1"]),
    ],
};

pub const A3: ReferenceTable = ReferenceTable {
    name: "A3",
    classes: &["[1^3]", "[3]a", "[3]b"],
    rows: &[
        ("[3]", &["1", "1", "1"]),
        ("[2,1]a", &["1", "w", "w^2"]),
        ("[2,1]b", &["1", "w^2", "w"]),
    ],
};

pub const S4: ReferenceTable = ReferenceTable {
    name: "S4",
    classes: &["[1^4]", "[2,1^2]", "[2^2]", "[3,1]", "[4]"],
    rows: &[
        ("[4]", &["1", "1", "1", "1", "1"]),
        ("[1^4]", &["1", "-1", "1", "1", "-1"]),
        ("[3,1]", &["3", "1", "-1", "0", "-1"]),
        ("[2,1^2]", &["3", "-1", "-1", "0", "1"]),
        ("[2^2]", &["2", "0", "2", "-1", "0"]),
    ],
};

/// Transcribed with the `[4,1]` and `[2,1^3]` rows interchanged. See [`S5_SWAPPED_ROWS`].
pub const S5_REFERENCE: ReferenceTable = ReferenceTable {
    name: "S5",
    classes: &["[1^5]", "[2,1^3]", "[2^2,1]", "[3,1^2]", "[4,1]", "[5]", "[3,2]"],
    rows: &[
        ("[5]", &["1", "1", "1", "1", "1", "1", "1"]),
        ("[1^5]", &["1", "-1", "1", "1", "-1", "1", "-1"]),
        ("[4,1]", &["4", "-2", "0", "1", "0", "-1", "1"]),
        ("[2,1^3]", &["4", "2", "0", "1", "0", "-1", "-1"]),
        ("[3,2]", &["5", "1", "1", "-1", "-1", "0", "1"]),
        ("[2^2,1]", &["5", "-1", "1", "-1", "1", "0", "-1"]),
        ("[3,1^2]", &["6", "0", "-2", "0", "0", "1", "0"]),
    ],
};

/// The reference S5 rows labelled `[4,1]` and `[2,1^3]` belong to each other: the standard
/// character `fix - 1` of `[4,1]` is `+2` on transpositions and `-1` on `[3,2]`.
pub const S5_SWAPPED_ROWS: (&str, &str) = ("[4,1]", "[2,1^3]");

pub const A4: ReferenceTable = ReferenceTable {
    name: "A4",
    classes: &["[1^4]", "[2^2]", "[3,1]a", "[3,1]b"],
    rows: &[
        ("[4]", &["1", "1", "1", "1"]),
        ("[3,1]", &["3", "-1", "0", "0"]),
        ("[2^2]a", &["1", "1", "w", "w^2"]),
        ("[2^2]b", &["1", "1", "w^2", "w"]),
    ],
};

pub const A5: ReferenceTable = ReferenceTable {
    name: "A5",
    classes: &["[1^5]", "[2^2,1]", "[3,1^2]", "[5]a", "[5]b"],
    rows: &[
        ("[5]", &["1", "1", "1", "1", "1"]),
        ("[4,1]", &["4", "0", "1", "-1", "-1"]),
        ("[3,2]", &["5", "1", "-1", "0", "0"]),
        ("[3,1^2]a", &["3", "-1", "0", "z", "z*"]),
        ("[3,1^2]b", &["3", "-1", "0", "z*", "z"]),
    ],
};

/// Entry notation: integers, `w` for the cube root of unity, `z` and `z*` for `(1 +- sqrt 5)/2`.
pub fn entry(s: &str) -> Cyclotomic {
    let half = Cyclotomic::from_frac(1, 2);
    match s {
        "w" => Cyclotomic::zeta(3),
        "w^2" => Cyclotomic::zeta(3).pow(2),
        "z" => &(&int(1) + &sqrt(5)) * &half,
        "z*" => &(&int(1) - &sqrt(5)) * &half,
        _ => int(s.parse().unwrap()),
    }
}

/// Row label used when reading a reference row, after undoing the known S5 interchange.
pub fn corrected_label(table: &ReferenceTable, label: &'static str) -> &'static str {
    if table.name != "S5" {
        return label;
    }
    match label {
        l if l == S5_SWAPPED_ROWS.0 => S5_SWAPPED_ROWS.1,
        l if l == S5_SWAPPED_ROWS.1 => S5_SWAPPED_ROWS.0,
        l => l,
    }
}

/// Cells where the computed table differs from the reference one, as `(irrep, class)`.
/// Also fails if the two tables do not have the same shape.
pub fn table_mismatches(
    computed: &CharacterTable,
    reference: &ReferenceTable,
    relabel: bool,
) -> Result<Vec<(String, String)>, String> {
    if computed.irreps().len() != reference.rows.len() || computed.classes().len() != reference.classes.len() {
        return Err(format!("{}: shape differs", reference.name));
    }
    let mut out = Vec::new();
    for (label, row) in reference.rows {
        let label = if relabel {
            corrected_label(reference, label)
        } else {
            label
        };
        let irrep: IrrepLabel = label.parse().map_err(|e| format!("{label}: {e}"))?;
        for (class, cell) in reference.classes.iter().zip(row.iter()) {
            let class_label: ClassLabel = class.parse().map_err(|e| format!("{class}: {e}"))?;
            let got = computed
                .value(&irrep, &class_label)
                .map_err(|e| format!("{}: {e}", reference.name))?;
            if *got != entry(cell) {
                out.push((label.to_string(), class.to_string()));
            }
        }
    }
    Ok(out)
}

pub fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &PROPERTY_SEED))
}

/// Runs `test` on `PROPERTY_CASES` values drawn from `strategy`, stopping at the first failure.
pub fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), String>) -> Result<u32, String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = runner();
    for case in 0..PROPERTY_CASES {
        let value = strategy
            .new_tree(&mut runner)
            .map_err(|e| format!("generation failed: {e}"))?
            .current();
        let shown = format!("{value:?}");
        test(value).map_err(|e| format!("case {case} {shown}: {e}"))?;
    }
    Ok(PROPERTY_CASES)
}

fn shuffled(n: usize, keys: Vec<u32>) -> Permutation {
    let mut idx: Vec<usize> = (1..=n).collect();
    idx.sort_by_key(|&i| keys[i - 1]);
    Permutation::from_images(&idx).unwrap()
}

/// A uniformly shuffled permutation of degree `n` in `lo..=hi`.
pub fn perm_strategy(lo: usize, hi: usize) -> impl Strategy<Value = Permutation> {
    (lo..=hi).prop_flat_map(|n| proptest::collection::vec(proptest::num::u32::ANY, n).prop_map(move |k| shuffled(n, k)))
}

pub fn perm_pair_strategy(lo: usize, hi: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (lo..=hi).prop_flat_map(|n| {
        let v = || proptest::collection::vec(proptest::num::u32::ANY, n);
        (v(), v()).prop_map(move |(a, b)| (shuffled(n, a), shuffled(n, b)))
    })
}

fn coefficient(tag: u8, k: i64) -> Cyclotomic {
    let base = match tag % 4 {
        0 => int(1),
        1 => Cyclotomic::zeta(3),
        2 => sqrt(2),
        _ => Cyclotomic::zeta(4),
    };
    &base * &int(k)
}

/// A sparse exact state with cyclotomic coefficients, shape `(n, d)` with `n <= max_n`.
#[derive(Clone, Debug)]
pub struct RandomState {
    pub n: usize,
    pub d: usize,
    pub terms: Vec<(Vec<usize>, u8, i64)>,
}

impl RandomState {
    pub fn exact(&self) -> StateVector {
        let terms = self
            .terms
            .iter()
            .map(|(digits, tag, k)| (Ket::new(digits.clone(), self.d).unwrap(), coefficient(*tag, *k)));
        StateVector::from_exact_terms(self.n, self.d, terms).unwrap()
    }
}

pub fn state_strategy(max_n: usize, max_d: usize) -> impl Strategy<Value = RandomState> {
    (2..=max_n, 2..=max_d).prop_flat_map(|(n, d)| {
        let term = (proptest::collection::vec(0..d, n), 0u8..4, -3i64..=3);
        proptest::collection::vec(term, 1..6).prop_map(move |terms| RandomState { n, d, terms })
    })
}

pub fn partition_strategy(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n).prop_flat_map(|n| {
        let all = partitions_of(n, n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn dense(psi: &StateVector) -> Vec<Complex64> {
    psi.to_dense(1 << 16).unwrap()
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `(sigma tau) psi = sigma (tau psi)`, exactly.
pub fn prop_action_law() -> Result<u32, String> {
    let strategy = (
        state_strategy(5, 3),
        proptest::collection::vec(proptest::num::u32::ANY, 10),
    );
    check(strategy, |(rs, keys)| {
        let n = rs.n;
        let sigma = shuffled(n, keys[..n].to_vec());
        let tau = shuffled(n, keys[5..5 + n].to_vec());
        let psi = rs.exact();
        let lhs = psi.act(&compose(&sigma, &tau).unwrap()).unwrap();
        let rhs = psi.act(&tau).unwrap().act(&sigma).unwrap();
        (lhs == rhs).then_some(()).ok_or_else(|| "action law violated".into())
    })
}

pub fn prop_sign_multiplicative() -> Result<u32, String> {
    check(perm_pair_strategy(1, 9), |(a, b)| {
        let ab = compose(&a, &b).unwrap();
        (ab.sign() == a.sign() * b.sign())
            .then_some(())
            .ok_or_else(|| "sign is not multiplicative".into())
    })
}

pub fn prop_dimension_squares() -> Result<u32, String> {
    check(1usize..=14, |n| {
        let sum: u128 = partitions_of(n, n).iter().map(|l| (dim_sn(l) as u128).pow(2)).sum();
        (sum == factorial(n) as u128)
            .then_some(())
            .ok_or_else(|| format!("sum of squares {sum} != {n}!"))
    })
}

/// Enumerated SYT and SSYT counts agree with the hook-length and hook-content formulas.
pub fn prop_tableau_counts() -> Result<u32, String> {
    check((partition_strategy(8), 1usize..=4), |(lambda, d)| {
        let syt = enumerate_syt(&lambda).map_err(|e| e.to_string())?.len() as u64;
        if syt != dim_sn(&lambda) {
            return Err(format!("{} SYT vs hook length {}", syt, dim_sn(&lambda)));
        }
        let ssyt: usize = ssyt_count_by_content(&lambda, d).values().sum();
        if ssyt as u64 != dim_sud(&lambda, d) {
            return Err(format!("{} SSYT vs hook content {}", ssyt, dim_sud(&lambda, d)));
        }
        Ok(())
    })
}

/// Permutation action, symmetrizer action and inner products agree between modes.
pub fn prop_exact_float_agreement() -> Result<u32, String> {
    let strategy = (
        state_strategy(4, 3),
        proptest::collection::vec(proptest::num::u32::ANY, 4),
        proptest::num::usize::ANY,
    );
    check(strategy, |(rs, keys, pick)| {
        let n = rs.n;
        let sigma = shuffled(n, keys[..n].to_vec());
        let exact = rs.exact();
        let float = exact.to_float();
        let partitions = partitions_of(n, n);
        let lambda = &partitions[pick % partitions.len()];
        let tableaux = enumerate_syt(lambda).unwrap();
        let y = generalized_symmetrizer(&tableaux[(pick / 7) % tableaux.len()]);

        let e = exact.act(&sigma).unwrap().apply_algebra(&y).unwrap();
        let f = float.act(&sigma).unwrap().apply_algebra(&y).unwrap();
        let gap = max_gap(&dense(&e.to_float()), &dense(&f));
        if gap > 1e-10 {
            return Err(format!("state gap {gap}"));
        }
        let ie = exact.inner(&e).unwrap().to_complex();
        let if_ = float.inner(&f).unwrap().to_complex();
        if (ie - if_).norm() > 1e-10 {
            return Err(format!("inner product gap {}", (ie - if_).norm()));
        }
        Ok(())
    })
}

pub type Property = (&'static str, fn() -> Result<u32, String>);

pub const PROPERTIES: [Property; 5] = [
    ("group-action law", prop_action_law),
    ("sign multiplicativity", prop_sign_multiplicative),
    ("sum of squared dimensions", prop_dimension_squares),
    ("tableau count formulas", prop_tableau_counts),
    ("exact vs float pipeline", prop_exact_float_agreement),
];
