//! Receiver side: pose recovery from possibly corrupted payloads and scene
//! rendering by skinning.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pointcloud::{skin_pose, upsample_interpolate, PointCloud};
use crate::rotation::{EulerAngles, Quaternion, Vec3};
use crate::semantics::{BaseKnowledge, Framework, SemanticFrame};
use crate::skeleton::{forward_kinematics, Pose};

/// A dequantized payload and transport counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub framework: Framework,
    pub frame: SemanticFrame,
    /// Scalars clamped by the transmitter's quantizer.
    pub clamped: usize,
    /// Bits that differ from what was sent, when known.
    pub bit_errors: usize,
}

/// A recovered pose and the number of sanitized values.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredPose {
    pub pose: Pose,
    pub sanitized: usize,
}

fn finite_or_zero(v: Vec3, fixed: &mut usize) -> Vec3 {
    if v.is_finite() {
        v
    } else {
        *fixed += 1;
        Vec3::ZERO
    }
}

/// Attaches received joint positions and orientations directly.
/// Quaternions are renormalized; a zero or non-finite one becomes the
/// identity. Positions are not constrained.
pub fn recover_pose_gsar(rx: &ReceivedFrame, bk: &BaseKnowledge) -> Result<RecoveredPose> {
    if bk.framework != Framework::Gsar || rx.framework != Framework::Gsar {
        return Err(Error::FrameworkMismatch(
            "GSAR recovery needs GSAR payload and knowledge".to_string(),
        ));
    }
    let SemanticFrame::Gsar {
        positions,
        rotations,
    } = &rx.frame
    else {
        return Err(Error::FrameworkMismatch(
            "expected a position and quaternion payload".to_string(),
        ));
    };
    check_count(positions.len(), bk)?;
    let mut sanitized = 0;
    let positions = positions
        .iter()
        .map(|&p| finite_or_zero(p, &mut sanitized))
        .collect();
    let rotations = rotations
        .iter()
        .map(|q| {
            q.normalized().unwrap_or_else(|| {
                sanitized += 1;
                Quaternion::IDENTITY
            })
        })
        .collect();
    Ok(RecoveredPose {
        pose: Pose {
            positions,
            rotations,
        },
        sanitized,
    })
}

/// Wraps received angles into `[-180, 180)` and runs forward kinematics
/// from the avatar origin, so every joint stays inside the reach sphere.
pub fn recover_pose_egsar(rx: &ReceivedFrame, bk: &BaseKnowledge) -> Result<RecoveredPose> {
    let graph = bk.skeleton.as_ref().ok_or(Error::MissingSkeleton)?;
    let origin = bk.avatar_origin.ok_or(Error::MissingSkeleton)?;
    let SemanticFrame::Euler { angles } = &rx.frame else {
        return Err(Error::FrameworkMismatch(
            "expected an Euler payload".to_string(),
        ));
    };
    check_count(angles.len(), bk)?;
    let mut sanitized = 0;
    let eulers: Vec<EulerAngles> = angles
        .iter()
        .map(|e| {
            if e.is_finite() {
                e.wrapped()
            } else {
                sanitized += 1;
                EulerAngles::ZERO
            }
        })
        .collect();
    let pose = forward_kinematics(graph, origin, &eulers)?;
    Ok(RecoveredPose { pose, sanitized })
}

fn check_count(found: usize, bk: &BaseKnowledge) -> Result<()> {
    let expected = bk
        .skeleton
        .as_ref()
        .map_or(bk.rest_joints.len(), |g| g.len());
    if expected > 0 && found != expected {
        return Err(Error::LengthMismatch {
            what: "received joints",
            expected,
            found,
        });
    }
    Ok(())
}

/// Selects the recovery path from the base knowledge: with a skeleton the
/// Euler branch, without it direct attachment.
pub fn recover_pose(rx: &ReceivedFrame, bk: &BaseKnowledge) -> Result<RecoveredPose> {
    if bk.skeleton.is_some() {
        recover_pose_egsar(rx, bk)
    } else {
        recover_pose_gsar(rx, bk)
    }
}

/// Skinned avatar followed by the stationary model.
pub fn recover_scene(bk: &BaseKnowledge, pose: &Pose) -> Result<PointCloud> {
    let mut scene = skin_pose(&bk.avatar, pose)?;
    scene.extend(&bk.stationary);
    Ok(scene)
}

/// Baseline receiver: interpolates the received cloud back up to `target`
/// points.
pub fn recover_baseline_scene(received: &PointCloud, target: usize) -> Result<PointCloud> {
    upsample_interpolate(received, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::SkinBinding;
    use crate::semantics::{build_base_knowledge, extract_semantics};
    use crate::skeleton::SkeletonGraph;
    use alloc::vec;

    fn knowledge(f: Framework) -> (SkeletonGraph, BaseKnowledge) {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        let bk = build_base_knowledge(
            f,
            Some(&g),
            SkinBinding::default(),
            PointCloud::default(),
            Vec3::ZERO,
            g.anchor(),
        )
        .unwrap();
        (g, bk)
    }

    #[test]
    fn zero_euler_gives_rest_pose() {
        let (g, bk) = knowledge(Framework::Egsar);
        let rx = ReceivedFrame {
            framework: Framework::Egsar,
            frame: SemanticFrame::Euler {
                angles: vec![EulerAngles::ZERO; 25],
            },
            clamped: 0,
            bit_errors: 0,
        };
        assert_eq!(recover_pose(&rx, &bk).unwrap().pose, g.rest_pose().unwrap());
    }

    #[test]
    fn zero_quaternion_sanitized() {
        let (g, bk) = knowledge(Framework::Gsar);
        let mut frame = extract_semantics(&g.rest_pose().unwrap(), Framework::Gsar).unwrap();
        if let SemanticFrame::Gsar {
            rotations,
            positions,
        } = &mut frame
        {
            rotations[3] = Quaternion::new(0.0, 0.0, 0.0, 0.0);
            positions[4] = Vec3::new(9.0, 9.0, 9.0);
        }
        let rx = ReceivedFrame {
            framework: Framework::Gsar,
            frame,
            clamped: 0,
            bit_errors: 0,
        };
        let r = recover_pose(&rx, &bk).unwrap();
        assert_eq!(r.sanitized, 1);
        assert_eq!(r.pose.rotations[3], Quaternion::IDENTITY);
        assert_eq!(r.pose.positions[4], Vec3::new(9.0, 9.0, 9.0));
        assert_eq!(r.pose.positions[5], g.rest_pose().unwrap().positions[5]);
    }

    #[test]
    fn euler_branch_needs_skeleton() {
        let (_, mut bk) = knowledge(Framework::Egsar);
        bk.skeleton = None;
        let rx = ReceivedFrame {
            framework: Framework::Egsar,
            frame: SemanticFrame::Euler {
                angles: vec![EulerAngles::ZERO; 25],
            },
            clamped: 0,
            bit_errors: 0,
        };
        assert_eq!(recover_pose_egsar(&rx, &bk), Err(Error::MissingSkeleton));
        assert_eq!(
            Error::MissingSkeleton.to_string(),
            "E-GSAR requires skeleton graph"
        );
    }

    #[test]
    fn count_mismatch_rejected() {
        let (_, bk) = knowledge(Framework::Egsar);
        let rx = ReceivedFrame {
            framework: Framework::Egsar,
            frame: SemanticFrame::Euler {
                angles: vec![EulerAngles::ZERO; 24],
            },
            clamped: 0,
            bit_errors: 0,
        };
        assert!(matches!(
            recover_pose(&rx, &bk),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
