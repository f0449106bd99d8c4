//! Euclidean distances and strict-threshold similarity predicates.
//!
//! Similarity is always `distance < theta`; a pair at exactly `theta` is
//! dissimilar. Objects are compared by the closest pair of their visual
//! objects. Nearest-object search is a linear scan.

use crate::error::{Error, Result};
use crate::perception::VisualObject;

pub fn frame_distance(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = f64::from(*x) - f64::from(*y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold {theta} must be finite and non-negative"
        )));
    }
    Ok(())
}

pub fn visual_object_distance(a: &VisualObject, b: &VisualObject) -> Result<f64> {
    frame_distance(&a.centroid, &b.centroid)
}

pub fn visual_object_similar(a: &VisualObject, b: &VisualObject, theta: f64) -> Result<bool> {
    check_theta(theta)?;
    Ok(visual_object_distance(a, b)? < theta)
}

/// Minimum distance over all cross pairs of two collections of visual
/// objects.
pub fn set_distance<'a, A, B>(a: A, b: B) -> Result<f64>
where
    A: IntoIterator<Item = &'a VisualObject>,
    B: IntoIterator<Item = &'a VisualObject>,
{
    let b: Vec<&VisualObject> = b.into_iter().collect();
    let mut best = f64::INFINITY;
    let mut a_empty = true;
    for va in a {
        a_empty = false;
        for vb in &b {
            if va.dim() != vb.dim() {
                return Err(Error::DimensionMismatch {
                    expected: va.dim(),
                    found: vb.dim(),
                });
            }
            let d = distance_unchecked(&va.centroid, &vb.centroid);
            if d < best {
                best = d;
            }
        }
    }
    if a_empty || b.is_empty() {
        return Err(Error::Empty("visual object set"));
    }
    Ok(best)
}

pub fn object_distance(a: &[VisualObject], b: &[VisualObject]) -> Result<f64> {
    set_distance(a, b)
}

pub fn object_similar(a: &[VisualObject], b: &[VisualObject], theta: f64) -> Result<bool> {
    check_theta(theta)?;
    Ok(object_distance(a, b)? < theta)
}
