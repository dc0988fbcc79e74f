use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AreaError {
    #[error("area fractions sum to {0}, expected 1")]
    FractionSum(f64),
    #[error("scaling ratio for `{0}` must be at least 1")]
    RatioBelowOne(String),
    #[error("resource class `{0}` has a fraction but no scaling ratio")]
    MissingRatio(String),
}

/// Resource mix of a block and its per-class FPGA-to-ASIC area ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaComposition {
    fractions: BTreeMap<String, f64>,
    ratios: BTreeMap<String, f64>,
    fpga_sectors: f64,
}

impl AreaComposition {
    pub fn new(
        fractions: impl IntoIterator<Item = (String, f64)>,
        ratios: impl IntoIterator<Item = (String, f64)>,
        fpga_sectors: f64,
    ) -> Result<Self, AreaError> {
        let fractions: BTreeMap<String, f64> = fractions.into_iter().collect();
        let ratios: BTreeMap<String, f64> = ratios.into_iter().collect();
        let sum: f64 = fractions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(AreaError::FractionSum(sum));
        }
        for (class, r) in &ratios {
            if *r < 1.0 {
                return Err(AreaError::RatioBelowOne(class.clone()));
            }
        }
        if let Some(class) = fractions.keys().find(|c| !ratios.contains_key(*c)) {
            return Err(AreaError::MissingRatio(class.clone()));
        }
        Ok(AreaComposition { fractions, ratios, fpga_sectors })
    }

    pub fn fpga_sectors(&self) -> f64 {
        self.fpga_sectors
    }
}

/// `fpga_sectors * sum(fraction / ratio)`, in equivalent FPGA sectors.
pub fn estimate_asic_area(c: &AreaComposition) -> f64 {
    c.fpga_sectors * c.fractions.iter().map(|(class, f)| f / c.ratios[class]).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(fr: &[(&str, f64)], ra: &[(&str, f64)], s: f64) -> Result<AreaComposition, AreaError> {
        AreaComposition::new(
            fr.iter().map(|(k, v)| (k.to_string(), *v)),
            ra.iter().map(|(k, v)| (k.to_string(), *v)),
            s,
        )
    }

    #[test]
    fn single_unit_ratio_is_identity() {
        let c = comp(&[("alm", 1.0)], &[("alm", 1.0)], 3.5).unwrap();
        assert_eq!(estimate_asic_area(&c), 3.5);
    }

    #[test]
    fn huge_ratios_tend_to_zero() {
        let c = comp(&[("a", 0.5), ("b", 0.5)], &[("a", 1e9), ("b", 1e9)], 2.8).unwrap();
        assert!(estimate_asic_area(&c) < 1e-8);
    }

    #[test]
    fn invariants_enforced() {
        assert!(matches!(comp(&[("a", 0.5)], &[("a", 2.0)], 1.0), Err(AreaError::FractionSum(_))));
        assert!(matches!(comp(&[("a", 1.0)], &[("a", 0.5)], 1.0), Err(AreaError::RatioBelowOne(_))));
        assert!(matches!(comp(&[("a", 1.0)], &[], 1.0), Err(AreaError::MissingRatio(_))));
    }
}
