//! CSV frames, the run manifest, and frame-by-frame comparison of two runs.
//!
//! Each frame is `frame_NNNN.csv` with header
//! `id,x,y,vx,vy,Fxx,Fxy,Fyx,Fyy` and every float printed with 17
//! significant digits. `manifest.json` echoes the scene and lists frame
//! files with their diagnostics.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostics;
use crate::error::{MpmError, Result};
use crate::explicit::SimState;
use crate::scene::SceneConfig;
use crate::{Mat2, Vec2};

pub const FRAME_HEADER: &str = "id,x,y,vx,vy,Fxx,Fxy,Fyx,Fyy";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleRecord {
    pub id: usize,
    pub x: Vec2,
    pub v: Vec2,
    pub f: Mat2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub time: f64,
    pub particles: Vec<ParticleRecord>,
    pub diagnostics: Diagnostics,
}

impl Frame {
    pub fn from_state(index: usize, state: &SimState, diagnostics: Diagnostics) -> Self {
        Frame {
            index,
            time: state.time,
            particles: state
                .particles
                .iter()
                .enumerate()
                .map(|(id, p)| ParticleRecord {
                    id,
                    x: p.x,
                    v: p.v,
                    f: p.f,
                })
                .collect(),
            diagnostics,
        }
    }
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:04}.csv")
}

pub fn format_frame(particles: &[ParticleRecord]) -> String {
    let mut out = String::with_capacity(32 + particles.len() * 220);
    out.push_str(FRAME_HEADER);
    out.push('\n');
    for p in particles {
        let values = [
            p.x.x,
            p.x.y,
            p.v.x,
            p.v.y,
            p.f[(0, 0)],
            p.f[(0, 1)],
            p.f[(1, 0)],
            p.f[(1, 1)],
        ];
        write!(out, "{}", p.id).unwrap();
        for v in values {
            write!(out, ",{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes one frame file into `out_dir` and returns its path.
pub fn write_frame(frame: &Frame, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join(frame_file_name(frame.index));
    fs::write(&path, format_frame(&frame.particles)).map_err(|e| MpmError::io(&path, e))?;
    Ok(path)
}

pub fn parse_frame(text: &str) -> Result<Vec<ParticleRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == FRAME_HEADER => {}
        other => {
            return Err(MpmError::Config(format!(
                "frame header mismatch: expected `{FRAME_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || MpmError::Config(format!("frame line {}: malformed row `{line}`", n + 2));
        let mut fields = line.split(',');
        let id: usize = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(bad)?;
        let vals: Vec<f64> = fields
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if vals.len() != 8 {
            return Err(bad());
        }
        out.push(ParticleRecord {
            id,
            x: Vec2::new(vals[0], vals[1]),
            v: Vec2::new(vals[2], vals[3]),
            f: Mat2::new(vals[4], vals[5], vals[6], vals[7]),
        });
    }
    Ok(out)
}

pub fn read_frame(path: &Path) -> Result<Vec<ParticleRecord>> {
    let text = fs::read_to_string(path).map_err(|e| MpmError::io(path, e))?;
    parse_frame(&text).map_err(|e| MpmError::Config(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestFrame {
    pub index: usize,
    pub time: f64,
    pub file: String,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SceneConfig,
    pub frames: Vec<ManifestFrame>,
}

impl Manifest {
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| MpmError::Config(format!("manifest serialization: {e}")))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| MpmError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(out_dir: &Path) -> Result<Self> {
        let path = out_dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| MpmError::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| MpmError::Config(format!("{}: {e}", path.display())))
    }
}

/// Position deviation between two runs at one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameDeviation {
    pub frame: usize,
    pub rms: f64,
    pub max: f64,
}

pub fn position_deviation(a: &[ParticleRecord], b: &[ParticleRecord]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(MpmError::Config(format!(
            "particle counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for (pa, pb) in a.iter().zip(b) {
        if pa.id != pb.id {
            return Err(MpmError::Config(format!(
                "particle ids differ: {} vs {}",
                pa.id, pb.id
            )));
        }
        let d = (pa.x - pb.x).norm();
        sum += d * d;
        max = max.max(d);
    }
    let rms = if a.is_empty() {
        0.0
    } else {
        (sum / a.len() as f64).sqrt()
    };
    Ok((rms, max))
}

fn frame_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| MpmError::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| MpmError::io(dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(idx) = name
            .strip_prefix("frame_")
            .and_then(|s| s.strip_suffix(".csv"))
            .and_then(|s| s.parse::<usize>().ok())
        {
            out.push((idx, entry.path()));
        }
    }
    out.sort();
    Ok(out)
}

/// Per-frame RMS and max particle position deviation between two run
/// directories.
pub fn diff_runs(dir_a: &Path, dir_b: &Path) -> Result<Vec<FrameDeviation>> {
    let a = frame_files(dir_a)?;
    let b = frame_files(dir_b)?;
    let ia: Vec<usize> = a.iter().map(|(i, _)| *i).collect();
    let ib: Vec<usize> = b.iter().map(|(i, _)| *i).collect();
    if ia != ib {
        return Err(MpmError::Config(format!(
            "runs have different frames: {} in {}, {} in {}",
            ia.len(),
            dir_a.display(),
            ib.len(),
            dir_b.display()
        )));
    }
    a.iter()
        .zip(&b)
        .map(|((idx, pa), (_, pb))| {
            let (rms, max) = position_deviation(&read_frame(pa)?, &read_frame(pb)?)?;
            Ok(FrameDeviation {
                frame: *idx,
                rms,
                max,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> Vec<ParticleRecord> {
        vec![
            ParticleRecord {
                id: 0,
                x: Vec2::new(0.1, 1.0 / 3.0),
                v: Vec2::new(-0.0, 1e-300),
                f: Mat2::new(1.0, 0.1, -0.2, std::f64::consts::PI),
            },
            ParticleRecord {
                id: 1,
                x: Vec2::new(0.7, 0.2),
                v: Vec2::new(3.0, -2.5),
                f: Mat2::identity(),
            },
        ]
    }

    #[test]
    fn two_particles_three_lines() {
        let text = format_frame(&records());
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), FRAME_HEADER);
    }

    #[test]
    fn values_round_trip_exactly() {
        let parsed = parse_frame(&format_frame(&records())).unwrap();
        assert_eq!(parsed, records());
    }

    #[test]
    fn header_is_checked() {
        assert!(parse_frame("id,x,y\n0,1,2\n").is_err());
        assert!(parse_frame(&format!("{FRAME_HEADER}\n0,1,2\n")).is_err());
    }

    #[test]
    fn deviation_of_identical_frames_is_zero() {
        let r = records();
        assert_eq!(position_deviation(&r, &r).unwrap(), (0.0, 0.0));
        let mut shifted = r.clone();
        shifted[1].x += Vec2::new(3e-3, 4e-3);
        let (rms, max) = position_deviation(&r, &shifted).unwrap();
        assert!((max - 5e-3).abs() < 1e-15);
        assert!((rms - 5e-3 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn write_and_diff_directories() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [a.path(), b.path()] {
            for index in 0..3 {
                let frame = Frame {
                    index,
                    time: index as f64,
                    particles: records(),
                    diagnostics: Diagnostics {
                        total_mass: 1.0,
                        momentum: [0.0, 0.0],
                        kinetic_energy: 0.0,
                        elastic_energy: 0.0,
                        gravitational_energy: 0.0,
                        macro_step: None,
                    },
                };
                write_frame(&frame, dir).unwrap();
            }
        }
        let d = diff_runs(a.path(), b.path()).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|f| f.rms == 0.0 && f.max == 0.0));
        fs::remove_file(b.path().join(frame_file_name(2))).unwrap();
        assert!(diff_runs(a.path(), b.path()).is_err());
    }
}
