//! Built-in example data: four state sets with their target families.
//!
//! Numbers are kept exactly as printed (four decimals), so members of the
//! qutrit set carry `0.5774` rather than `1/sqrt(3)` as first coefficient.
//! Fixtures are not physicality-checked.

mod data;

use crate::error::{Error, Result};
use crate::state::{CoefficientVector, StateSet, TargetFamily};

/// One named example: a set plus the target families swept against it.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub set: StateSet,
    /// `(variant name, family)`, in presentation order.
    pub variants: Vec<(String, TargetFamily)>,
    pub notes: Vec<String>,
}

impl Fixture {
    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// Looks up a variant; accepts `r01^1`, `r_01^1`, `r01-1` and `r01_1`.
    pub fn family(&self, variant: &str) -> Result<&TargetFamily> {
        let want = normalize_variant(variant);
        self.variants
            .iter()
            .find(|(name, _)| *name == want)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::UnknownVariant {
                fixture: self.name.to_string(),
                variant: variant.to_string(),
            })
    }

    pub fn variant_names(&self) -> Vec<&str> {
        self.variants.iter().map(|(n, _)| n.as_str()).collect()
    }
}

fn normalize_variant(v: &str) -> String {
    let v = v.trim().to_ascii_lowercase();
    let v = v.strip_prefix("r_").map(|s| format!("r{s}")).unwrap_or(v);
    v.replace(['-', '_'], "^")
}

pub const FIXTURE_NAMES: [&str; 4] = ["example-i", "example-ii", "example-iii", "example-iv"];

pub fn catalog() -> Vec<Fixture> {
    FIXTURE_NAMES
        .iter()
        .map(|n| fixture(n).expect("built-in fixtures are well formed"))
        .collect()
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "example-i" => example_i(),
        "example-ii" => example_ii(),
        "example-iii" => example_iii(),
        "example-iv" => example_iv(),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn with_head(head: f64, tail: &[f64]) -> Result<CoefficientVector> {
    let mut c = Vec::with_capacity(tail.len() + 1);
    c.push(head);
    c.extend_from_slice(tail);
    CoefficientVector::from_coeffs(c)
}

fn labelled(members: Vec<CoefficientVector>) -> Result<StateSet> {
    let labels = (1..=members.len()).map(|i| format!("r{i}")).collect();
    StateSet::new(members)?.with_labels(labels)
}

fn example_i() -> Result<Fixture> {
    let set = labelled(
        data::EX1_SET_TAIL
            .iter()
            .map(|t| with_head(S2, t))
            .collect::<Result<_>>()?,
    )?;
    let mixed = CoefficientVector::maximally_mixed(2)?;
    let variants = data::EX1_TARGET_TAILS
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let name = format!("r02^{}", i + 1);
            let fam = TargetFamily::new(
                mixed.clone(),
                with_head(S2, t)?,
                format!("maximally mixed -> {name}"),
            )?;
            Ok((name, fam))
        })
        .collect::<Result<_>>()?;
    Ok(Fixture {
        name: "example-i",
        description: "qubit, three random states",
        set,
        variants,
        notes: Vec::new(),
    })
}

fn example_ii() -> Result<Fixture> {
    let axes = [
        [S2, S2, 0.0, 0.0],
        [S2, -S2, 0.0, 0.0],
        [S2, 0.0, S2, 0.0],
        [S2, 0.0, -S2, 0.0],
        [S2, 0.0, 0.0, S2],
        [S2, 0.0, 0.0, -S2],
    ];
    let set = StateSet::new(
        axes.iter()
            .map(|c| CoefficientVector::from_coeffs(c.to_vec()))
            .collect::<Result<_>>()?,
    )?
    .with_labels(
        ["+x", "-x", "+y", "-y", "+z", "-z"]
            .map(String::from)
            .to_vec(),
    )?;
    let s6 = 1.0 / 6f64.sqrt();
    let ends = [
        CoefficientVector::maximally_mixed(2)?,
        CoefficientVector::from_coeffs(vec![S2, s6, s6, s6])?,
        CoefficientVector::from_coeffs(vec![S2, 0.5, -0.5, 0.0])?,
    ];
    let at_zero = with_head(S2, &data::EX2_TARGET_TAIL)?;
    Ok(Fixture {
        name: "example-ii",
        description: "qubit, the six Pauli eigenstates",
        set,
        variants: families(&ends, &at_zero)?,
        notes: Vec::new(),
    })
}

fn example_iii() -> Result<Fixture> {
    let set = labelled(
        data::EX3_SET
            .iter()
            .map(|c| CoefficientVector::from_coeffs(c.to_vec()))
            .collect::<Result<_>>()?,
    )?;
    let s3 = 1.0 / 3f64.sqrt();
    let mut half = vec![0.5 * s3; 9];
    half[0] = s3;
    let ends = [
        CoefficientVector::maximally_mixed(3)?,
        CoefficientVector::from_coeffs(half)?,
    ];
    let at_zero = with_head(s3, &data::EX3_TARGET_TAIL)?;
    Ok(Fixture {
        name: "example-iii",
        description: "qutrit, fifteen random states",
        set,
        variants: families(&ends, &at_zero)?,
        notes: vec![
            "target r01^3 omitted: its printed coefficients are square roots of negative numbers"
                .to_string(),
        ],
    })
}

fn example_iv() -> Result<Fixture> {
    let set = labelled(
        data::EX4_SET
            .iter()
            .map(|c| CoefficientVector::from_coeffs(c.to_vec()))
            .collect::<Result<_>>()?,
    )?;
    let s5 = 0.5 / 5f64.sqrt();
    let mut all = vec![s5; 16];
    all[0] = 0.5;
    let mut partial = vec![0.0; 16];
    partial[0] = 0.5;
    partial[1..8].iter_mut().for_each(|x| *x = s5);
    let ends = [
        CoefficientVector::maximally_mixed(4)?,
        CoefficientVector::from_coeffs(all)?,
        CoefficientVector::from_coeffs(partial)?,
    ];
    let at_zero = CoefficientVector::from_coeffs(data::EX4_TARGET.to_vec())?;
    Ok(Fixture {
        name: "example-iv",
        description: "ququart, twenty random pure states",
        set,
        variants: families(&ends, &at_zero)?,
        notes: Vec::new(),
    })
}

fn families(
    ends: &[CoefficientVector],
    at_zero: &CoefficientVector,
) -> Result<Vec<(String, TargetFamily)>> {
    ends.iter()
        .enumerate()
        .map(|(i, e)| {
            let name = format!("r01^{}", i + 1);
            let fam = TargetFamily::new(e.clone(), at_zero.clone(), format!("{name} -> r02"))?;
            Ok((name, fam))
        })
        .collect()
}
