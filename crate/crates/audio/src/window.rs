use std::f64::consts::TAU;
use std::str::FromStr;

/// Periodic analysis windows (the `n`-point window is the first `n` samples
/// of the symmetric `n+1`-point one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let n_f = n as f64;
        (0..n)
            .map(|i| {
                let phase = TAU * i as f64 / n_f;
                match self {
                    Window::Hann => 0.5 - 0.5 * phase.cos(),
                    Window::Hamming => 0.54 - 0.46 * phase.cos(),
                    Window::Rectangular => 1.0,
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Rectangular => "rectangular",
        }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Window::Hann),
            "hamming" => Ok(Window::Hamming),
            "rect" | "rectangular" | "boxcar" => Ok(Window::Rectangular),
            other => Err(format!("unknown window '{other}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hann_is_periodic() {
        let w = Window::Hann.coefficients(4);
        let expect = [0.0, 0.5, 1.0, 0.5];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_names() {
        for w in [Window::Hann, Window::Hamming, Window::Rectangular] {
            assert_eq!(w.name().parse::<Window>().unwrap(), w);
        }
        assert!("kaiser".parse::<Window>().is_err());
    }
}
