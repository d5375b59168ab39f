use crate::matrix::Matrix;

pub const DEFAULT_FLOOR_DB: f64 = -80.0;

/// `20·log10(mag / max)` clipped below at `floor_db`. An all-zero input is
/// uniformly `floor_db`.
pub fn amplitude_to_db(mag: &Matrix, floor_db: f64) -> Matrix {
    let max = mag.max();
    if !(max > 0.0) {
        return Matrix::filled(mag.rows, mag.cols, floor_db);
    }
    mag.map(|m| {
        if m <= 0.0 {
            floor_db
        } else {
            (20.0 * (m / max).log10()).max(floor_db)
        }
    })
}

/// `10·log10(power / max)` clipped below at `floor_db`; equal to
/// `amplitude_to_db` of the square-root magnitudes.
pub fn power_to_db(power: &Matrix, floor_db: f64) -> Matrix {
    let max = power.max();
    if !(max > 0.0) {
        return Matrix::filled(power.rows, power.cols, floor_db);
    }
    power.map(|p| {
        if p <= 0.0 {
            floor_db
        } else {
            (10.0 * (p / max).log10()).max(floor_db)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        let m = Matrix::from_vec(1, 4, vec![2.0, 1.0, 0.0, 1e-9]).unwrap();
        let db = amplitude_to_db(&m, DEFAULT_FLOOR_DB);
        assert_eq!(db.data[0], 0.0);
        assert!((db.data[1] + 6.020599913279624).abs() < 1e-12);
        assert_eq!(db.data[2], -80.0);
        assert_eq!(db.data[3], -80.0);
    }

    #[test]
    fn silence_is_floor() {
        let db = amplitude_to_db(&Matrix::zeros(3, 2), -60.0);
        assert!(db.data.iter().all(|&v| v == -60.0));
        assert!(power_to_db(&Matrix::zeros(1, 1), -60.0).data == vec![-60.0]);
    }

    #[test]
    fn power_and_amplitude_agree() {
        let mag = Matrix::from_vec(1, 5, vec![3.0, 0.2, 1.0, 0.0, 0.01]).unwrap();
        let a = amplitude_to_db(&mag, -80.0);
        let p = power_to_db(&mag.map(|v| v * v), -80.0);
        for (x, y) in a.data.iter().zip(&p.data) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
