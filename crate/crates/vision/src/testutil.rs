use deepfuse_core::bundle::N_LANDMARKS;
use deepfuse_core::LandmarkFrame;

pub fn blank_frame(width: u32, height: u32) -> LandmarkFrame {
    LandmarkFrame {
        frame_index: 0,
        image_width: width,
        image_height: height,
        roi_box: [0, 0, width, height],
        points: vec![[0.5, 0.5, 0.0]; N_LANDMARKS],
    }
}
