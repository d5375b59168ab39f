//! FaceMesh landmark index tables.
//!
//! "Left"/"right" follow the mesh's own naming for the pupil and kite tables.
//! The blink table pairs each upper-lid landmark with the lower-lid landmark
//! in the same mesh column:
//!
//! | eye (image side) | corners   | upper / lower pairs                                   |
//! |------------------|-----------|-------------------------------------------------------|
//! | right (left)     | 130 / 243 | 161/110, 160/24, 159/23, 158/22, 157/26               |
//! | left (right)     | 359 / 463 | 388/339, 387/254, 386/253, 385/252, 384/256           |
//!
//! The left-eye set is the mesh-symmetric mirror of the right-eye set.

pub const NOSE_BASE: usize = 1;
pub const NOSE_TIP: usize = 197;
pub const MOUTH_LEFT: usize = 61;
pub const MOUTH_RIGHT: usize = 291;

/// Center-top / center-bottom eyelid landmarks used for the pupil centers.
pub const LEFT_PUPIL: (usize, usize) = (159, 145);
pub const RIGHT_PUPIL: (usize, usize) = (386, 374);

/// Kite vertices for the cheekbone height.
pub const KITE_LEFT_CHEEKBONE: usize = 234;
pub const KITE_RIGHT_CHEEKBONE: usize = 454;
pub const KITE_MID_TOP: usize = 197;
pub const KITE_CHIN: usize = 152;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EyeLandmarks {
    pub corners: (usize, usize),
    pub lid_pairs: Vec<(usize, usize)>,
}

impl EyeLandmarks {
    pub fn right_default() -> Self {
        EyeLandmarks {
            corners: (130, 243),
            lid_pairs: vec![(161, 110), (160, 24), (159, 23), (158, 22), (157, 26)],
        }
    }

    pub fn left_default() -> Self {
        EyeLandmarks {
            corners: (359, 463),
            lid_pairs: vec![(388, 339), (387, 254), (386, 253), (385, 252), (384, 256)],
        }
    }
}

/// Landmarks matched to the six points of the canonical head model
/// (nose tip, chin, image-left eye corner, image-right eye corner,
/// image-left mouth corner, image-right mouth corner).
pub const PNP_LANDMARKS: [usize; 6] = [1, 152, 33, 263, 61, 291];
