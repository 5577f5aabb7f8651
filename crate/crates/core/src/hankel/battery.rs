//! Seeded randomized trials of the determinant-identity suite over exact
//! rationals. Every residual must be exactly zero; any nonzero residual is an
//! implementation bug, which the report surfaces with the offending elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{
    check_bilinear, check_combined, check_offset_identities, check_sums, check_vandermonde,
    HankelElem, HankelTable, PowerSumLaw, RawSeq, ResidualReport,
};
use crate::numeric::Rational;

/// The identity names reported by the battery, in reporting order.
pub const IDENTITY_NAMES: [&str; 17] = [
    "linear.product",
    "linear.rank",
    "offset.1",
    "offset.2",
    "offset.3",
    "offset.4",
    "offset.5",
    "bilinear.1",
    "bilinear.2",
    "bilinear.3",
    "bilinear.4",
    "sums.1",
    "sums.2",
    "sums.3",
    "sums.4",
    "combined.1",
    "combined.2",
];

#[derive(Clone, Debug)]
pub struct BatteryConfig {
    pub trials: u64,
    /// Largest node count N for the law-based identities.
    pub max_n: usize,
    pub seed: u64,
    /// Deliberately corrupt one element per trial (negative control; the
    /// battery must then fail).
    pub corrupt: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { trials: 200, max_n: 5, seed: 7, corrupt: false }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityCount {
    pub name: &'static str,
    pub passes: u64,
    pub failures: u64,
}

#[derive(Clone, Debug)]
pub struct FailureRecord {
    pub identity: String,
    pub k: i64,
    pub l: i64,
    pub residual: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct BatteryReport {
    pub trials: u64,
    pub seed: u64,
    pub counts: Vec<IdentityCount>,
    pub first_failure: Option<FailureRecord>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.first_failure.is_none() && self.counts.iter().all(|c| c.failures == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "trials": self.trials,
            "seed": self.seed,
            "identities": self.counts.iter().map(|c| json!({
                "name": c.name,
                "passes": c.passes,
                "failures": c.failures,
            })).collect::<Vec<_>>(),
            "first_failure": self.first_failure.as_ref().map(|f| json!({
                "identity": f.identity,
                "k": f.k,
                "l": f.l,
                "residual": f.residual,
                "elements": f.elements,
            })),
        })
    }
}

struct Tally {
    counts: Vec<IdentityCount>,
    first_failure: Option<FailureRecord>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            counts: IDENTITY_NAMES
                .iter()
                .map(|&name| IdentityCount { name, passes: 0, failures: 0 })
                .collect(),
            first_failure: None,
        }
    }

    fn absorb(&mut self, report: &ResidualReport<Rational>, elements: &[Rational]) {
        for e in &report.entries {
            let slot = self
                .counts
                .iter_mut()
                .find(|c| c.name == e.identity)
                .expect("identity name registered");
            if e.residual.elem_is_zero() {
                slot.passes += 1;
            } else {
                slot.failures += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(FailureRecord {
                        identity: e.identity.to_string(),
                        k: e.k,
                        l: e.l,
                        residual: e.residual.to_string(),
                        elements: elements.iter().map(|x| x.to_string()).collect(),
                    });
                }
            }
        }
    }

    fn error(&mut self, identity: &'static str, message: String) {
        let slot = self
            .counts
            .iter_mut()
            .find(|c| c.name == identity)
            .expect("identity name registered");
        slot.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(FailureRecord {
                identity: identity.to_string(),
                k: 0,
                l: 0,
                residual: message,
                elements: Vec::new(),
            });
        }
    }
}

fn rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = rational(rng);
        if !crate::numeric::Scalar::is_zero(&r) {
            return r;
        }
    }
}

fn positive_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

fn distinct_nonzero_nodes(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut nodes: Vec<Rational> = Vec::with_capacity(n);
    while nodes.len() < n {
        let cand = nonzero_rational(rng);
        if !nodes.contains(&cand) {
            nodes.push(cand);
        }
    }
    nodes
}

fn distinct_positive_nodes(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut nodes: Vec<Rational> = Vec::with_capacity(n);
    while nodes.len() < n {
        let cand = positive_rational(rng);
        if !nodes.contains(&cand) {
            nodes.push(cand);
        }
    }
    nodes
}

fn law_elements(law: &PowerSumLaw<Rational>, lo: i64, hi: i64) -> Vec<Rational> {
    (lo..=hi).map(|k| law.element_at(k)).collect()
}

/// Bumps the element at sequence position `offset` by one (negative control).
fn corrupt_entry(seq: &mut RawSeq<Rational>, offset: i64) {
    let idx = offset.max(0) as usize % seq.items().len();
    let bumped = crate::numeric::Scalar::add(&seq.items()[idx], &Rational::from(1));
    seq.items_mut()[idx] = bumped;
}

/// Runs `cfg.trials` independent trials. Each trial exercises all 17
/// identities once with freshly drawn parameters.
pub fn run_battery(cfg: &BatteryConfig) -> BatteryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::new();

    for _ in 0..cfg.trials {
        let n = rng.gen_range(1..=cfg.max_n);

        // linear identities on a pure power-sum sequence; the determinants are
        // evaluated from materialized elements, the products from the law, so
        // the negative control (corrupting one element) is detectable here
        let law = PowerSumLaw::new(
            (0..n).map(|_| nonzero_rational(&mut rng)).collect(),
            distinct_nonzero_nodes(&mut rng, n),
        );
        let l = rng.gen_range(-1..=2);
        let mut seq = law.seq(-3, 2 * n as i64 + 4);
        if cfg.corrupt {
            corrupt_entry(&mut seq, 3 + l);
        }
        let elements = seq.items().to_vec();
        match check_vandermonde(&HankelTable::new(seq), &law, l) {
            Ok(rep) => tally.absorb(&rep, &elements),
            Err(e) => tally.error("linear.product", e.to_string()),
        }

        // offset identities on a centered law
        let law = PowerSumLaw::with_center(
            (0..n).map(|_| nonzero_rational(&mut rng)).collect(),
            distinct_nonzero_nodes(&mut rng, n),
            Rational::new(1, 2),
        );
        let l_pos = rng.gen_range(1..=2);
        let k_above = n as i64 + rng.gen_range(1..=2);
        let mut seq = law.seq(-1, 2 * n as i64 + 4);
        if cfg.corrupt {
            corrupt_entry(&mut seq, 1 + l_pos);
        }
        let elements = seq.items().to_vec();
        match check_offset_identities(&HankelTable::new(seq), &law, l_pos, k_above) {
            Ok(rep) => tally.absorb(&rep, &elements),
            Err(e) => tally.error("offset.1", e.to_string()),
        }

        // bilinear + combined identities hold for an arbitrary sequence
        let seq = RawSeq::new(-2, (0..16).map(|_| rational(&mut rng)).collect());
        let elements: Vec<Rational> = seq.items().to_vec();
        let tbl = HankelTable::new(seq);
        let k = rng.gen_range(-1..=4);
        let l = rng.gen_range(0..=3);
        match check_bilinear(&tbl, k, l) {
            Ok(rep) => tally.absorb(&rep, &elements),
            Err(e) => tally.error("bilinear.1", e.to_string()),
        }
        let k = rng.gen_range(0..=4);
        match check_combined(&tbl, k) {
            Ok(rep) => tally.absorb(&rep, &elements),
            Err(e) => tally.error("combined.1", e.to_string()),
        }

        // telescoping sums need nonvanishing shifted determinants; same-sign
        // nodes with positive weights guarantee that
        let law = PowerSumLaw::with_center(
            (0..n).map(|_| positive_rational(&mut rng)).collect(),
            distinct_positive_nodes(&mut rng, n),
            Rational::new(1, 2),
        );
        let k = rng.gen_range(0..n as i64);
        let tbl = HankelTable::new(law.seq(-1, 2 * n as i64 + 2));
        match check_sums(&tbl, n, k) {
            Ok(rep) => tally.absorb(&rep, &law_elements(&law, -1, 2 * n as i64 + 2)),
            Err(e) => tally.error("sums.1", e.to_string()),
        }
    }

    BatteryReport {
        trials: cfg.trials,
        seed: cfg.seed,
        counts: tally.counts,
        first_failure: tally.first_failure,
    }
}
