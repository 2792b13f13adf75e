//! Grayscale PGM images of stored snapshots.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bqp_core::diagnostics::format_float;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use crate::config::SnapshotField;
use crate::error::CliError;
use crate::run::{field_index, list_snapshots, load_run_config, read_markers, read_snapshot};

pub const SIDECAR: &str = "render.txt";

/// Maps `[lo, hi]` linearly onto `0..=255`; image row 0 is the top edge `y = L`.
pub fn to_gray(values: &[f64], n: usize, lo: f64, hi: f64) -> Vec<u8> {
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = vec![0u8; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let v = (values[iy * n + ix] - lo) / span;
            out[(n - 1 - iy) * n + ix] = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    out
}

/// Draws the closed polyline through `points` (physical coordinates) by
/// inverting the pixels it crosses.
pub fn overlay_polyline(img: &mut [u8], n: usize, length: f64, points: &[[f64; 2]]) {
    let to_px = |p: [f64; 2]| (p[0] / length * n as f64, p[1] / length * n as f64);
    let mut hit = vec![false; n * n];
    for i in 0..points.len() {
        let (ax, ay) = to_px(points[i]);
        let (bx, by) = to_px(points[(i + 1) % points.len()]);
        let steps = ((bx - ax).abs().max((by - ay).abs()).ceil() as usize).max(1) * 2;
        for s in 0..=steps {
            let w = s as f64 / steps as f64;
            let x = (ax + w * (bx - ax)).round() as i64;
            let y = (ay + w * (by - ay)).round() as i64;
            let (x, y) = (x.rem_euclid(n as i64) as usize, y.rem_euclid(n as i64) as usize);
            hit[(n - 1 - y) * n + x] = true;
        }
    }
    for (px, h) in img.iter_mut().zip(hit) {
        if h {
            *px = if *px > 127 { 0 } else { 255 };
        }
    }
}

fn write_pgm(path: &Path, pixels: &[u8], n: usize) -> Result<(), CliError> {
    let file = fs::File::create(path)?;
    let enc = PnmEncoder::new(std::io::BufWriter::new(file)).with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary));
    enc.write_image(pixels, n as u32, n as u32, ExtendedColorType::L8)
        .map_err(CliError::runtime)
}

/// Writes `theta_NNNNN.pgm` and `omega_NNNNN.pgm` for every snapshot, with one
/// value range per field shared by all snapshots.
pub fn cmd_render(run_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let cfg = load_run_config(run_dir)?;
    let snaps = list_snapshots(run_dir)?;
    let markers = read_markers(run_dir)?;
    let loaded = snaps.iter().map(|p| read_snapshot(p)).collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(out_dir)?;
    let n = cfg.grid.n;
    let mut sidecar = Vec::new();
    let mut written = Vec::new();
    for field in [SnapshotField::Theta, SnapshotField::Omega] {
        let i = field_index(&cfg, field);
        let (lo, hi) = loaded.iter().flat_map(|s| s.fields[i].iter()).fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), &v| (lo.min(v), hi.max(v)),
        );
        writeln!(sidecar, "field={} min={} max={} map=linear range=0..255", field.name(), format_float(lo), format_float(hi))?;
        for (k, snap) in loaded.iter().enumerate() {
            let mut img = to_gray(&snap.fields[i], n, lo, hi);
            if let Some(m) = markers.get(&k) {
                let pts: Vec<[f64; 2]> = m.iter().map(|s| s.p).collect();
                overlay_polyline(&mut img, n, cfg.grid.length, &pts);
            }
            let name = format!("{}_{k:05}.pgm", field.name());
            let path = out_dir.join(&name);
            write_pgm(&path, &img, n)?;
            writeln!(sidecar, "file={name} field={} t={}", field.name(), format_float(snap.t))?;
            written.push(path);
        }
    }
    fs::write(out_dir.join(SIDECAR), sidecar)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_map_is_linear_and_flipped() {
        let n = 2;
        let v = [0.0, 1.0, 0.5, 2.0];
        let g = to_gray(&v, n, 0.0, 2.0);
        // bottom row of the image is iy = 0
        assert_eq!(g, vec![64, 255, 0, 128]);
    }

    #[test]
    fn overlay_inverts_crossed_pixels() {
        let n = 16;
        let mut img = vec![0u8; n * n];
        let pts = [[4.0, 4.0], [12.0, 4.0], [12.0, 12.0], [4.0, 12.0]];
        overlay_polyline(&mut img, n, 16.0, &pts);
        assert_eq!(img[(n - 1 - 4) * n + 8], 255);
        assert_eq!(img[(n - 1 - 8) * n + 8], 0);
    }
}
