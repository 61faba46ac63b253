//! Angle conventions shared by features and sentence generation.
//!
//! Image coordinates grow rightward and downward. Every angle in this crate is
//! measured in the viewer's frame instead: 0 points right and +π/2 points up.

use std::f64::consts::PI;

/// Viewer-frame angle of an image-space displacement; 0 for the zero vector.
pub fn screen_angle(dx: f64, dy: f64) -> f64 {
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    wrap_angle((-dy).atan2(dx))
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = (theta + PI).rem_euclid(two_pi) - PI;
    if t >= PI {
        t -= two_pi;
    }
    t
}

/// Viewer-relative direction bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrant {
    Right,
    Up,
    Left,
    Down,
}

/// Quantizes an angle into four bins split at ±45° and ±135°. An angle exactly
/// on a boundary belongs to the horizontal bin.
pub fn quadrant(theta: f64) -> Quadrant {
    quadrant_split(theta, 45.0)
}

/// Like [`quadrant`], with the horizontal bins spanning `±half_width` degrees
/// around 0° and 180°.
pub fn quadrant_split(theta: f64, half_width: f64) -> Quadrant {
    let deg = wrap_angle(theta).to_degrees();
    let far = 180.0 - half_width;
    if deg.abs() <= half_width {
        Quadrant::Right
    } else if deg > half_width && deg < far {
        Quadrant::Up
    } else if deg < -half_width && deg > -far {
        Quadrant::Down
    } else {
        Quadrant::Left
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn screen_angle_flips_y() {
        assert_eq!(screen_angle(1.0, 0.0), 0.0);
        assert!((screen_angle(0.0, -1.0) - PI / 2.0).abs() < 1e-12);
        assert!((screen_angle(0.0, 1.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(screen_angle(-1.0, 0.0), -PI);
        assert_eq!(screen_angle(0.0, 0.0), 0.0);
    }

    #[test]
    fn wrap_stays_half_open() {
        for k in -5..5 {
            let t = wrap_angle(PI + 2.0 * PI * k as f64);
            assert!((-PI..PI).contains(&t), "{t}");
        }
        assert!((wrap_angle(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn quadrant_ties_go_horizontal() {
        assert_eq!(quadrant(PI / 4.0), Quadrant::Right);
        assert_eq!(quadrant(-PI / 4.0), Quadrant::Right);
        assert_eq!(quadrant(3.0 * PI / 4.0), Quadrant::Left);
        assert_eq!(quadrant(-3.0 * PI / 4.0), Quadrant::Left);
        assert_eq!(quadrant(PI / 2.0), Quadrant::Up);
        assert_eq!(quadrant(-PI / 2.0), Quadrant::Down);
        assert_eq!(quadrant(-PI), Quadrant::Left);
    }
}
