//! HTK mel scale.

use crate::error::{AudioError, Result};

pub fn hz_to_mel(hz: f64) -> Result<f64> {
    if !(hz >= 0.0) {
        return Err(AudioError::Negative { what: "frequency", value: hz });
    }
    Ok(2595.0 * (1.0 + hz / 700.0).log10())
}

pub fn mel_to_hz(mel: f64) -> Result<f64> {
    if !(mel >= 0.0) {
        return Err(AudioError::Negative { what: "mel value", value: mel });
    }
    Ok(700.0 * (10f64.powf(mel / 2595.0) - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_kilohertz_is_about_a_thousand_mels() {
        let m = hz_to_mel(1000.0).unwrap();
        assert!((999.9..=1000.1).contains(&m), "{m}");
        assert_eq!(hz_to_mel(0.0).unwrap(), 0.0);
        assert_eq!(mel_to_hz(0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_rejected() {
        assert!(hz_to_mel(-1.0).is_err());
        assert!(mel_to_hz(-0.5).is_err());
        assert!(hz_to_mel(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(f in 0.0f64..8000.0) {
            let back = mel_to_hz(hz_to_mel(f).unwrap()).unwrap();
            prop_assert!((back - f).abs() <= 1e-9 * f.max(1e-3));
        }

        #[test]
        fn strictly_increasing(a in 0.0f64..8000.0, d in 1e-3f64..100.0) {
            prop_assert!(hz_to_mel(a + d).unwrap() > hz_to_mel(a).unwrap());
        }
    }
}
