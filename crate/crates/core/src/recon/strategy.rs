use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How a face coefficient (temperature, velocity, `u^2`) is evaluated from
/// the two cells sharing the face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReconstructionStrategy {
    /// Mean of the two linearly reconstructed face states.
    LRAverage,
    /// Mean of the two cell values.
    Arithmetic,
    /// Cell values weighted by inverse distance to the face centroid.
    InverseDistance,
    /// Value of the cell on the owner side.
    OneSidedLeft,
    /// Value of the cell on the neighbor side.
    OneSidedRight,
    /// `omega * left + (1 - omega) * right`.
    Weighted(f64),
}

impl ReconstructionStrategy {
    pub const NAMES: [&'static str; 6] = [
        "lr-average",
        "arithmetic",
        "inverse-distance",
        "one-sided-left",
        "one-sided-right",
        "weighted:<omega>",
    ];

    pub fn weighted(omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::InvalidArgument(format!(
                "weight omega must lie in [0, 1], got {omega}"
            )));
        }
        Ok(Self::Weighted(omega))
    }

    /// True when the value is exact for linear fields on uniform grids.
    pub fn is_centered(&self) -> bool {
        match self {
            Self::OneSidedLeft | Self::OneSidedRight => false,
            Self::Weighted(w) => *w == 0.5,
            _ => true,
        }
    }
}

impl fmt::Display for ReconstructionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LRAverage => f.write_str("lr-average"),
            Self::Arithmetic => f.write_str("arithmetic"),
            Self::InverseDistance => f.write_str("inverse-distance"),
            Self::OneSidedLeft => f.write_str("one-sided-left"),
            Self::OneSidedRight => f.write_str("one-sided-right"),
            Self::Weighted(w) => write!(f, "weighted:{w}"),
        }
    }
}

impl FromStr for ReconstructionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "lr-average" => Ok(Self::LRAverage),
            "arithmetic" => Ok(Self::Arithmetic),
            "inverse-distance" => Ok(Self::InverseDistance),
            "one-sided-left" => Ok(Self::OneSidedLeft),
            "one-sided-right" => Ok(Self::OneSidedRight),
            _ => {
                if let Some(w) = s.strip_prefix("weighted:") {
                    let omega: f64 = w
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid weight in strategy '{s}'")))?;
                    Self::weighted(omega).map_err(|e| Error::Config(e.to_string()))
                } else {
                    Err(Error::Config(format!(
                        "unknown strategy '{s}'; valid names: {}",
                        Self::NAMES.join(", ")
                    )))
                }
            }
        }
    }
}

/// Evaluates a face coefficient.
///
/// `cell` holds the two cell values `(T_j, T_k)`, `recon` the two linearly
/// reconstructed face values `(T_L, T_R)` and `dist` the distances from the
/// face centroid to the two cell centroids. Only `LRAverage` reads `recon`
/// and only `InverseDistance` reads `dist`.
pub fn face_scalar(
    strategy: ReconstructionStrategy,
    cell: [f64; 2],
    recon: [f64; 2],
    dist: [f64; 2],
) -> Result<f64> {
    use ReconstructionStrategy::*;
    let [tj, tk] = cell;
    Ok(match strategy {
        LRAverage => 0.5 * (recon[0] + recon[1]),
        Arithmetic => 0.5 * (tj + tk),
        InverseDistance => {
            let [dj, dk] = dist;
            if !(dj > 0.0 && dk > 0.0) {
                return Err(Error::DegenerateGeometry(format!(
                    "inverse-distance weighting with distances ({dj:e}, {dk:e})"
                )));
            }
            let (wj, wk) = (1.0 / dj, 1.0 / dk);
            (wj * tj + wk * tk) / (wj + wk)
        }
        OneSidedLeft => tj,
        OneSidedRight => tk,
        Weighted(w) => w * tj + (1.0 - w) * tk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ReconstructionStrategy::*;

    const NONE: [f64; 2] = [f64::NAN, f64::NAN];

    #[test]
    fn arithmetic_of_equal_values() {
        assert_eq!(
            face_scalar(Arithmetic, [1.0, 1.0], NONE, NONE).unwrap(),
            1.0
        );
    }

    #[test]
    fn inverse_distance_hand_value() {
        let t = face_scalar(InverseDistance, [2.0, 4.0], NONE, [1.0, 3.0]).unwrap();
        assert!((t - 2.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_distance_zero_distance() {
        let err = face_scalar(InverseDistance, [2.0, 4.0], NONE, [0.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
    }

    #[test]
    fn weighted_one_is_one_sided() {
        let w = ReconstructionStrategy::weighted(1.0).unwrap();
        assert_eq!(face_scalar(w, [9.0, 25.0], NONE, NONE).unwrap(), 9.0);
        assert_eq!(
            face_scalar(OneSidedRight, [9.0, 25.0], NONE, NONE).unwrap(),
            25.0
        );
    }

    #[test]
    fn lr_average_uses_reconstructed_values() {
        let t = face_scalar(LRAverage, [0.0, 0.0], [1.0, 2.0], NONE).unwrap();
        assert_eq!(t, 1.5);
    }

    #[test]
    fn names_round_trip() {
        for s in [
            LRAverage,
            Arithmetic,
            InverseDistance,
            OneSidedLeft,
            OneSidedRight,
            Weighted(0.75),
        ] {
            assert_eq!(s.to_string().parse::<ReconstructionStrategy>().unwrap(), s);
        }
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        let err = "harmonic".parse::<ReconstructionStrategy>().unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("lr-average") && msg.contains("weighted:<omega>"));
        assert!("weighted:1.5".parse::<ReconstructionStrategy>().is_err());
        assert!("weighted:abc".parse::<ReconstructionStrategy>().is_err());
    }

    proptest! {
        #[test]
        fn weighted_half_matches_arithmetic(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let w = face_scalar(Weighted(0.5), [a, b], NONE, NONE).unwrap();
            let m = face_scalar(Arithmetic, [a, b], NONE, NONE).unwrap();
            prop_assert!((w - m).abs() <= f64::EPSILON * (a.abs() + b.abs()));
        }

        #[test]
        fn equal_distance_inverse_weighting_is_arithmetic(
            a in -1e3f64..1e3, b in -1e3f64..1e3, d in 1e-6f64..10.0,
        ) {
            let w = face_scalar(InverseDistance, [a, b], NONE, [d, d]).unwrap();
            let m = face_scalar(Arithmetic, [a, b], NONE, NONE).unwrap();
            prop_assert!((w - m).abs() <= 2.0 * f64::EPSILON * (a.abs() + b.abs()));
        }

        #[test]
        fn arithmetic_is_bounded_and_positive(a in 1e-8f64..1e3, b in 1e-8f64..1e3) {
            let m = face_scalar(Arithmetic, [a, b], NONE, NONE).unwrap();
            prop_assert!(m > 0.0);
            prop_assert!(m >= a.min(b) && m <= a.max(b));
        }
    }
}
