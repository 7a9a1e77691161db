//! Physical parameters, reflection-parity sectors, quantum numbers and
//! state enumeration.
//!
//! Half-integer angular indices are stored doubled (`n2 = 2n`) so that all
//! quantum-number arithmetic stays in integers.

use crate::error::{Error, Result};
use std::fmt;

/// The deformation pair (mu1, mu2); both must exceed -1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    mu1: f64,
    mu2: f64,
}

impl Parameters {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        if !mu1.is_finite() || mu1 <= -0.5 {
            return Err(Error::domain(format!("mu1 = {mu1} must be > -1/2")));
        }
        if !mu2.is_finite() || mu2 <= -0.5 {
            return Err(Error::domain(format!("mu2 = {mu2} must be > -1/2")));
        }
        Ok(Parameters { mu1, mu2 })
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    /// mu1 + mu2
    pub fn mu_sum(&self) -> f64 {
        self.mu1 + self.mu2
    }
}

/// Joint reflection parities (eps1, eps2); eigenvalues of R_i are s_i = 1 - 2 eps_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorLabel {
    eps1: u8,
    eps2: u8,
}

impl SectorLabel {
    pub fn new(eps1: u8, eps2: u8) -> Result<Self> {
        if eps1 > 1 || eps2 > 1 {
            return Err(Error::domain(format!(
                "sector labels must be 0 or 1, got ({eps1},{eps2})"
            )));
        }
        Ok(SectorLabel { eps1, eps2 })
    }

    pub fn eps1(&self) -> u8 {
        self.eps1
    }

    pub fn eps2(&self) -> u8 {
        self.eps2
    }

    /// Reflection eigenvalue of R_1 (+1 or -1).
    pub fn s1(&self) -> i8 {
        1 - 2 * self.eps1 as i8
    }

    /// Reflection eigenvalue of R_2 (+1 or -1).
    pub fn s2(&self) -> i8 {
        1 - 2 * self.eps2 as i8
    }

    /// Two-bit code used for deterministic ordering.
    pub fn code(&self) -> u8 {
        (self.eps1 << 1) | self.eps2
    }

    pub fn all() -> [SectorLabel; 4] {
        [
            SectorLabel { eps1: 0, eps2: 0 },
            SectorLabel { eps1: 0, eps2: 1 },
            SectorLabel { eps1: 1, eps2: 0 },
            SectorLabel { eps1: 1, eps2: 1 },
        ]
    }

    /// Smallest admissible doubled angular index in this sector.
    pub fn min_n2(&self) -> u32 {
        match (self.eps1, self.eps2) {
            (0, 0) => 0,
            (1, 1) => 2,
            _ => 1,
        }
    }

    /// Whether the doubled index `n2` is admissible here: its parity must match
    /// the sector (even iff eps1 == eps2) and it must reach the sector minimum.
    pub fn admits_n2(&self, n2: u32) -> bool {
        let even = n2 % 2 == 0;
        even == (self.eps1 == self.eps2) && n2 >= self.min_n2()
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.eps1, self.eps2)
    }
}

/// Full label of a bound state: sector, doubled angular index and radial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    sector: SectorLabel,
    n2: u32,
    k: u32,
}

impl QuantumNumbers {
    pub fn new(sector: SectorLabel, n2: u32, k: u32) -> Result<Self> {
        if !sector.admits_n2(n2) {
            return Err(Error::domain(format!(
                "n2 = {n2} is not admissible in sector {sector}"
            )));
        }
        Ok(QuantumNumbers { sector, n2, k })
    }

    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    /// Doubled angular index 2n.
    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The (possibly half-integer) angular index n.
    pub fn n(&self) -> f64 {
        self.n2 as f64 / 2.0
    }

    /// Degree of the Jacobi polynomial carried by the angular factor.
    pub fn jacobi_degree(&self) -> u32 {
        (self.n2 - self.sector.eps1 as u32 - self.sector.eps2 as u32) / 2
    }

    /// alpha = 2n + mu1 + mu2, the Laguerre parameter of the radial factor.
    pub fn alpha(&self, p: &Parameters) -> f64 {
        self.n2 as f64 + p.mu_sum()
    }

    /// Energy 2k + 2n + mu1 + mu2 + 1 of the unextended state.
    pub fn energy(&self, p: &Parameters) -> f64 {
        (2 * self.k + self.n2) as f64 + p.mu_sum() + 1.0
    }

    /// Separation constant M^2 = 4n(n + mu1 + mu2).
    pub fn msq(&self, p: &Parameters) -> f64 {
        let n2 = self.n2 as f64;
        n2 * (n2 + 2.0 * p.mu_sum())
    }
}

/// Type tag of an X_m-Laguerre extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtensionType {
    I,
    II,
    III,
}

impl fmt::Display for ExtensionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionType::I => write!(f, "I"),
            ExtensionType::II => write!(f, "II"),
            ExtensionType::III => write!(f, "III"),
        }
    }
}

/// Extension request: type and seed degree m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtensionSpec {
    tau: ExtensionType,
    m: u32,
}

impl ExtensionSpec {
    pub fn new(tau: ExtensionType, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Admissibility("m must be a positive integer".into()));
        }
        if tau == ExtensionType::III && m % 2 != 0 {
            return Err(Error::Admissibility(format!(
                "type III requires even m, got m = {m}"
            )));
        }
        Ok(ExtensionSpec { tau, m })
    }

    pub fn tau(&self) -> ExtensionType {
        self.tau
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Admissible radial indices: k >= m for types I/II, k = 0 or k >= m+1 for III.
    pub fn admits_k(&self, k: u32) -> bool {
        match self.tau {
            ExtensionType::I | ExtensionType::II => k >= self.m,
            ExtensionType::III => k == 0 || k >= self.m + 1,
        }
    }

    /// Shifted energy 2k - 2m + 2n + mu1 + mu2 + 1 of the extended state.
    pub fn energy(&self, k: u32, n2: u32, p: &Parameters) -> f64 {
        (2 * k as i64 - 2 * self.m as i64 + n2 as i64) as f64 + p.mu_sum() + 1.0
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tau, self.m)
    }
}

/// All states with energy <= `e_cap`, each exactly once, sorted by
/// (energy, sector code, n). Ties within a level are deterministic.
pub fn enumerate_states(p: &Parameters, e_cap: f64) -> Vec<QuantumNumbers> {
    let mut out = Vec::new();
    let mut level: u32 = 0;
    loop {
        let energy = level as f64 + p.mu_sum() + 1.0;
        if energy > e_cap {
            break;
        }
        let mut at_level: Vec<QuantumNumbers> = Vec::new();
        for sector in SectorLabel::all() {
            let mut n2 = sector.min_n2();
            while n2 <= level {
                if sector.admits_n2(n2) && (level - n2) % 2 == 0 {
                    let k = (level - n2) / 2;
                    at_level.push(QuantumNumbers { sector, n2, k });
                }
                n2 += 1;
            }
        }
        at_level.sort_by_key(|qn| (qn.sector.code(), qn.n2));
        out.extend(at_level);
        level += 1;
        if level > 10_000 {
            break; // guard against absurd caps
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent brute-force count of states at level N = 2k + 2n,
    /// enumerating (sector, n2, k) directly from the sector rules.
    fn level_count_oracle(level: u32) -> usize {
        let mut count = 0;
        for sector in SectorLabel::all() {
            for n2 in 0..=level {
                if sector.admits_n2(n2) && (level - n2) % 2 == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Cartesian oracle at mu = 0: the ordinary 2D oscillator level
    /// N = n1 + n2 has one state per partition, i.e. N + 1 states.
    fn cartesian_oscillator_count(level: u32) -> usize {
        (0..=level).map(|_| 1).sum()
    }

    #[test]
    fn parameters_domain() {
        assert!(Parameters::new(0.3, 0.7).is_ok());
        assert!(Parameters::new(0.0, 0.0).is_ok());
        let err = Parameters::new(-0.5, 0.1).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("mu1")));
        let err = Parameters::new(0.1, -0.6).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("mu2")));
    }

    #[test]
    fn alpha_values() {
        let p = Parameters::new(0.3, 0.7).unwrap();
        let qn = QuantumNumbers::new(SectorLabel::new(0, 0).unwrap(), 0, 0).unwrap();
        assert_eq!(qn.alpha(&p), 1.0);

        let p0 = Parameters::new(0.0, 0.0).unwrap();
        let qn = QuantumNumbers::new(SectorLabel::new(0, 1).unwrap(), 1, 0).unwrap();
        assert_eq!(qn.alpha(&p0), 1.0);

        let p = Parameters::new(0.25, 0.25).unwrap();
        let qn = QuantumNumbers::new(SectorLabel::new(0, 0).unwrap(), 4, 0).unwrap();
        assert_eq!(qn.alpha(&p), 4.5);
    }

    #[test]
    fn sector_rules() {
        let s00 = SectorLabel::new(0, 0).unwrap();
        let s11 = SectorLabel::new(1, 1).unwrap();
        let s01 = SectorLabel::new(0, 1).unwrap();
        assert!(s00.admits_n2(0) && s00.admits_n2(2));
        assert!(!s00.admits_n2(1));
        assert!(!s11.admits_n2(0) && s11.admits_n2(2));
        assert!(s01.admits_n2(1) && !s01.admits_n2(2));
        assert!(SectorLabel::new(2, 0).is_err());
        assert_eq!(s00.s1(), 1);
        assert_eq!(SectorLabel::new(1, 0).unwrap().s1(), -1);
    }

    #[test]
    fn ground_state_only_at_minimal_cap() {
        let p = Parameters::new(0.3, 0.7).unwrap();
        let cap = p.mu_sum() + 1.0;
        let states = enumerate_states(&p, cap);
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].n2(), 0);
        assert_eq!(states[0].k(), 0);
        assert_eq!(states[0].sector().code(), 0);
    }

    #[test]
    fn level_counts_match_oracle() {
        // Frozen from the brute-force oracle: level N holds N + 1 states.
        assert_eq!(level_count_oracle(2), 3);
        assert_eq!(level_count_oracle(3), 4);
        for level in 0..=20 {
            assert_eq!(level_count_oracle(level), level as usize + 1);
        }
        // At mu = 0 this must agree with the ordinary 2D oscillator degeneracy.
        for level in 0..=20 {
            assert_eq!(level_count_oracle(level), cartesian_oscillator_count(level));
        }
    }

    #[test]
    fn enumeration_matches_level_counts() {
        let p = Parameters::new(0.3, 0.7).unwrap();
        let states = enumerate_states(&p, p.mu_sum() + 1.0 + 6.0);
        let expected: usize = (0..=6).map(|l| level_count_oracle(l)).sum();
        assert_eq!(states.len(), expected);
        // sorted by (energy, sector code, n)
        for w in states.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let ka = (2 * a.k() + a.n2(), a.sector().code(), a.n2());
            let kb = (2 * b.k() + b.n2(), b.sector().code(), b.n2());
            assert!(ka < kb, "ordering violated: {ka:?} !< {kb:?}");
        }
    }

    #[test]
    fn extension_spec_rules() {
        assert!(ExtensionSpec::new(ExtensionType::III, 1).is_err());
        assert!(ExtensionSpec::new(ExtensionType::III, 2).is_ok());
        assert!(ExtensionSpec::new(ExtensionType::I, 0).is_err());
        let s = ExtensionSpec::new(ExtensionType::I, 1).unwrap();
        assert!(!s.admits_k(0) && s.admits_k(1));
        let s3 = ExtensionSpec::new(ExtensionType::III, 2).unwrap();
        assert!(s3.admits_k(0) && !s3.admits_k(1) && !s3.admits_k(2) && s3.admits_k(3));
    }

    #[test]
    fn extended_energy_values() {
        let p = Parameters::new(0.3, 0.7).unwrap();
        let s = ExtensionSpec::new(ExtensionType::I, 1).unwrap();
        assert_eq!(s.energy(1, 0, &p), 2.0);
        let s3 = ExtensionSpec::new(ExtensionType::III, 2).unwrap();
        assert_eq!(s3.energy(0, 2, &p), 0.0);
    }

    proptest! {
        #[test]
        fn enumerated_states_satisfy_invariants(cap_plus in 0.0f64..18.0, mu1 in -0.49f64..2.0, mu2 in -0.49f64..2.0) {
            let p = Parameters::new(mu1, mu2).unwrap();
            let cap = p.mu_sum() + 1.0 + cap_plus;
            let states = enumerate_states(&p, cap);
            let mut seen = std::collections::HashSet::new();
            for qn in &states {
                prop_assert!(qn.sector().admits_n2(qn.n2()));
                prop_assert!(qn.energy(&p) <= cap);
                // jacobi degree is a nonnegative integer by construction
                let _ = qn.jacobi_degree();
                prop_assert!(seen.insert((qn.sector().code(), qn.n2(), qn.k())), "duplicate state");
            }
        }
    }
}
