//! Head pose: Rodrigues conversions, x-y-z Euler decomposition and a
//! Levenberg-Marquardt perspective-n-point solver.
//!
//! Conventions: camera looks down +z with image y pointing down. A rotation
//! `R` composes as `R = Rx(pitch) · Ry(yaw) · Rz(roll)` (intrinsic x-y-z),
//! which is the decomposition an RQ factorization of `R` yields. A model
//! point `P` maps to camera coordinates `R·P + t` and projects with the pinhole
//! intrinsics, no distortion.

use nalgebra::{Matrix3, Matrix6, SMatrix, Vector3, Vector6};

use crate::error::{Result, VisionError};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

fn skew(k: &Vec3) -> Mat3 {
    Mat3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0)
}

/// Axis-angle vector to rotation matrix:
/// `R = I·cosθ + (1−cosθ)·k·kᵀ + [k]ₓ·sinθ`, θ = ‖v‖, k = v/θ.
pub fn rodrigues(rvec: &Vec3) -> Mat3 {
    let theta = rvec.norm();
    if theta == 0.0 {
        return Mat3::identity();
    }
    let k = rvec / theta;
    let (s, c) = theta.sin_cos();
    Mat3::identity() * c + (k * k.transpose()) * (1.0 - c) + skew(&k) * s
}

/// Rotation matrix to axis-angle vector with angle in `[0, π]`.
pub fn rodrigues_inverse(r: &Mat3) -> Vec3 {
    let cos_theta = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let vee = Vec3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    if theta < 1e-6 {
        // first-order: R ≈ I + [v]ₓ
        return vee / 2.0;
    }
    if std::f64::consts::PI - theta > 1e-4 {
        return vee * (theta / (2.0 * theta.sin()));
    }
    // near π: axis from the symmetric part, sign fixed by the skew part
    let b = (r + r.transpose()) / 2.0 - Mat3::identity() * cos_theta;
    let col = (0..3)
        .max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)]))
        .unwrap_or(0);
    let mut k: Vec3 = b.column(col).into();
    k /= k.norm();
    if k.dot(&vee) < 0.0 {
        k = -k;
    }
    k * theta
}

pub fn rot_x(deg: f64) -> Mat3 {
    let (s, c) = deg.to_radians().sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(deg: f64) -> Mat3 {
    let (s, c) = deg.to_radians().sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(deg: f64) -> Mat3 {
    let (s, c) = deg.to_radians().sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
    /// Yaw at ±90°: pitch and roll are not separable and roll is reported as 0.
    pub gimbal_lock: bool,
}

pub fn compose_euler(pitch: f64, yaw: f64, roll: f64) -> Mat3 {
    rot_x(pitch) * rot_y(yaw) * rot_z(roll)
}

pub fn orthonormality_error(r: &Mat3) -> f64 {
    (r.transpose() * r - Mat3::identity()).abs().max()
}

pub fn euler_from_rotation(r: &Mat3) -> Result<EulerAngles> {
    if orthonormality_error(r) > 1e-6 || (r.determinant() - 1.0).abs() > 1e-6 {
        return Err(VisionError::Degenerate("matrix is not a rotation".into()));
    }
    let sin_yaw = r[(0, 2)].clamp(-1.0, 1.0);
    let cos_yaw = r[(0, 0)].hypot(r[(0, 1)]);
    let yaw = sin_yaw.atan2(cos_yaw).to_degrees();
    if cos_yaw < 1e-8 {
        return Ok(EulerAngles {
            pitch: r[(2, 1)].atan2(r[(1, 1)]).to_degrees(),
            yaw,
            roll: 0.0,
            gimbal_lock: true,
        });
    }
    Ok(EulerAngles {
        pitch: (-r[(1, 2)]).atan2(r[(2, 2)]).to_degrees(),
        yaw,
        roll: (-r[(0, 1)]).atan2(r[(0, 0)]).to_degrees(),
        gimbal_lock: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    /// Focal length equal to the image width, principal point at the center.
    pub fn for_image(width: f64, height: f64) -> Self {
        CameraIntrinsics {
            fx: width,
            fy: width,
            cx: width / 2.0,
            cy: height / 2.0,
        }
    }

    pub fn project(&self, p: &Vec3) -> [f64; 2] {
        [self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy]
    }
}

/// Six-point generic head model in the camera-aligned frame (x right, y down,
/// z away from the camera), nose tip at the origin. Order matches
/// [`crate::landmarks::PNP_LANDMARKS`].
pub const CANONICAL_HEAD_MODEL: [[f64; 3]; 6] = [
    [0.0, 0.0, 0.0],         // nose tip
    [0.0, 330.0, 65.0],      // chin
    [-225.0, -170.0, 135.0], // image-left eye outer corner
    [225.0, -170.0, 135.0],  // image-right eye outer corner
    [-150.0, 150.0, 125.0],  // image-left mouth corner
    [150.0, 150.0, 125.0],   // image-right mouth corner
];

#[derive(Debug, Clone, PartialEq)]
pub struct PnpConfig {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    /// Unconverged solutions above this RMS reprojection error are rejected.
    pub max_rms_px: f64,
}

impl Default for PnpConfig {
    fn default() -> Self {
        PnpConfig {
            max_iterations: 100,
            step_tolerance: 1e-10,
            max_rms_px: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadPose {
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
    pub rotation: Mat3,
    pub translation: Vec3,
    pub rms_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl HeadPose {
    pub fn rvec(&self) -> Vec3 {
        rodrigues_inverse(&self.rotation)
    }
}

struct Fit {
    rotation: Mat3,
    translation: Vec3,
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn residuals(model: &[Vec3], image: &[[f64; 2]], cam: &CameraIntrinsics, r: &Mat3, t: &Vec3) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(model.len() * 2);
    for (p, uv) in model.iter().zip(image) {
        let pc = r * p + t;
        if pc.z <= 0.0 {
            return None;
        }
        let proj = cam.project(&pc);
        out.push(proj[0] - uv[0]);
        out.push(proj[1] - uv[1]);
    }
    Some(out)
}

fn levenberg_marquardt(model: &[Vec3], image: &[[f64; 2]], cam: &CameraIntrinsics, r0: Mat3, t0: Vec3, cfg: &PnpConfig) -> Option<Fit> {
    let mut r = r0;
    let mut t = t0;
    let mut res = residuals(model, image, cam, &r, &t)?;
    let mut cost: f64 = res.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        // Jacobian w.r.t. a left-multiplied rotation increment ω and translation.
        let mut jtj = Matrix6::<f64>::zeros();
        let mut jtr = Vector6::<f64>::zeros();
        for (i, p) in model.iter().enumerate() {
            let rp = r * p;
            let pc = rp + t;
            let iz = 1.0 / pc.z;
            let d_proj = SMatrix::<f64, 2, 3>::new(
                cam.fx * iz,
                0.0,
                -cam.fx * pc.x * iz * iz,
                0.0,
                cam.fy * iz,
                -cam.fy * pc.y * iz * iz,
            );
            let mut d_pc = SMatrix::<f64, 3, 6>::zeros();
            d_pc.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-skew(&rp)));
            d_pc.fixed_view_mut::<3, 3>(0, 3).copy_from(&Mat3::identity());
            let j = d_proj * d_pc;
            let ri = nalgebra::Vector2::new(res[2 * i], res[2 * i + 1]);
            jtj += j.transpose() * j;
            jtr += j.transpose() * ri;
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for k in 0..6 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let omega = Vec3::new(step[0], step[1], step[2]);
            let r_new = rodrigues(&omega) * r;
            let t_new = t + Vec3::new(step[3], step[4], step[5]);
            let step_norm = step.norm();
            match residuals(model, image, cam, &r_new, &t_new) {
                Some(res_new) => {
                    let cost_new: f64 = res_new.iter().map(|v| v * v).sum();
                    if cost_new <= cost {
                        r = r_new;
                        t = t_new;
                        res = res_new;
                        cost = cost_new;
                        lambda = (lambda / 10.0).max(1e-12);
                        accepted = true;
                        if step_norm < cfg.step_tolerance {
                            converged = true;
                        }
                        break;
                    }
                }
                None => {}
            }
            if step_norm < cfg.step_tolerance {
                // further damping only shrinks an already negligible step
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            break;
        }
    }
    // re-orthonormalize accumulated rotation
    let r = rodrigues(&rodrigues_inverse(&r));
    let res = residuals(model, image, cam, &r, &t)?;
    Some(Fit {
        rotation: r,
        translation: t,
        cost: res.iter().map(|v| v * v).sum(),
        iterations,
        converged,
    })
}

/// Translation that places the model centroid on the ray through the image
/// centroid at a depth matching the image spread.
fn initial_translation(model: &[Vec3], image: &[[f64; 2]], cam: &CameraIntrinsics) -> Vec3 {
    let n = model.len() as f64;
    let mc = model.iter().fold(Vec3::zeros(), |a, p| a + p) / n;
    let (mu, mv) = image.iter().fold((0.0, 0.0), |a, uv| (a.0 + uv[0] / n, a.1 + uv[1] / n));
    let model_spread = (model.iter().map(|p| (p.x - mc.x).powi(2) + (p.y - mc.y).powi(2)).sum::<f64>() / n).sqrt();
    let image_spread = (image.iter().map(|uv| (uv[0] - mu).powi(2) + (uv[1] - mv).powi(2)).sum::<f64>() / n).sqrt();
    let depth = if image_spread > 0.0 {
        cam.fx * model_spread / image_spread
    } else {
        cam.fx
    };
    Vec3::new((mu - cam.cx) * depth / cam.fx, (mv - cam.cy) * depth / cam.fy, depth) - mc
}

/// Minimizes the summed squared reprojection error over rotation and
/// translation. Starts from a frontal guess plus four tilted guesses and keeps
/// the lowest-error solution.
pub fn solve_pnp(model_points: &[[f64; 3]], image_points: &[[f64; 2]], cam: &CameraIntrinsics, cfg: &PnpConfig) -> Result<HeadPose> {
    if model_points.len() != image_points.len() {
        return Err(VisionError::Pnp(format!(
            "{} model points but {} image points",
            model_points.len(),
            image_points.len()
        )));
    }
    if model_points.len() < 6 {
        return Err(VisionError::Pnp(format!(
            "need at least 6 correspondences, got {}",
            model_points.len()
        )));
    }
    if !(cam.fx > 0.0 && cam.fy > 0.0) {
        return Err(VisionError::Pnp("focal lengths must be positive".into()));
    }
    if image_points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(VisionError::Pnp("non-finite image point".into()));
    }
    let model: Vec<Vec3> = model_points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
    let t0 = initial_translation(&model, image_points, cam);

    let starts = [
        Mat3::identity(),
        rot_y(45.0),
        rot_y(-45.0),
        rot_x(45.0),
        rot_x(-45.0),
    ];
    let mut best: Option<Fit> = None;
    for r0 in starts {
        if let Some(fit) = levenberg_marquardt(&model, image_points, cam, r0, t0, cfg) {
            let better = best.as_ref().is_none_or(|b| fit.cost < b.cost);
            if better {
                best = Some(fit);
            }
        }
        // a converged near-exact fit cannot be improved on
        if best
            .as_ref()
            .is_some_and(|b| b.converged && (b.cost / model.len() as f64).sqrt() < 1e-9)
        {
            break;
        }
    }
    let fit = best.ok_or_else(|| VisionError::Pnp("all model points behind the camera".into()))?;
    let rms = (fit.cost / model.len() as f64).sqrt();
    if model.iter().any(|p| (fit.rotation * p + fit.translation).z <= 0.0) {
        return Err(VisionError::Pnp("solution places points behind the camera".into()));
    }
    if !fit.converged && rms > cfg.max_rms_px {
        return Err(VisionError::Pnp(format!(
            "no convergence after {} iterations, RMS {rms:.3} px",
            fit.iterations
        )));
    }
    let e = euler_from_rotation(&fit.rotation)?;
    Ok(HeadPose {
        pitch: e.pitch,
        yaw: e.yaw,
        roll: e.roll,
        rotation: fit.rotation,
        translation: fit.translation,
        rms_error: rms,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

/// Projects model points at a known pose; the forward model of [`solve_pnp`].
pub fn project_points(model_points: &[[f64; 3]], rotation: &Mat3, translation: &Vec3, cam: &CameraIntrinsics) -> Vec<[f64; 2]> {
    model_points
        .iter()
        .map(|p| cam.project(&(rotation * Vec3::new(p[0], p[1], p[2]) + translation)))
        .collect()
}

/// Population standard deviation of pitch, yaw and roll across frames.
pub fn headpose_spread(poses: &[HeadPose]) -> Result<[f64; 3]> {
    if poses.len() < 2 {
        return Err(VisionError::NotEnoughFrames {
            needed: 2,
            have: poses.len(),
        });
    }
    let std = |f: fn(&HeadPose) -> f64| {
        let n = poses.len() as f64;
        let mean = poses.iter().map(f).sum::<f64>() / n;
        (poses.iter().map(|p| (f(p) - mean).powi(2)).sum::<f64>() / n).sqrt()
    };
    Ok([std(|p| p.pitch), std(|p| p.yaw), std(|p| p.roll)])
}
