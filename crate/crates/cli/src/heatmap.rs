//! Plain PGM (P2) rasters, one pixel per sample, rows in sample order.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use lsi_core::{ContentCountMap, SinrField};

/// Gray levels used for quantized SINR maps.
pub const SINR_LEVELS: u32 = 255;

fn pgm(nx: usize, ny: usize, maxval: u32, pixels: &[u32]) -> String {
    debug_assert_eq!(pixels.len(), nx * ny);
    let mut out = format!("P2\n{nx} {ny}\n{maxval}\n");
    for row in pixels.chunks(nx) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Count map as levels `0..=M`.
pub fn count_map_pgm(map: &ContentCountMap) -> String {
    let pixels: Vec<u32> = map.counts.iter().map(|&c| u32::from(c)).collect();
    pgm(map.nx, map.ny, map.m_count as u32, &pixels)
}

/// Linear quantization of `[low, high]` dB onto `0..=255`, clamped.
pub fn quantize_db(v: f64, (low, high): (f64, f64)) -> u32 {
    let t = ((v - low) / (high - low)).clamp(0.0, 1.0);
    (t * f64::from(SINR_LEVELS)).round() as u32
}

pub fn sinr_field_pgm(field: &SinrField, range_db: (f64, f64)) -> String {
    let pixels: Vec<u32> = field
        .values_db
        .iter()
        .map(|&v| quantize_db(v, range_db))
        .collect();
    pgm(field.nx, field.ny, SINR_LEVELS, &pixels)
}

/// Sidecar text describing how SINR gray levels map back to dB.
pub fn sinr_sidecar(field: &SinrField, range_db: (f64, f64)) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "content = {}", field.content);
    let _ = writeln!(s, "range_db = {} {}", range_db.0, range_db.1);
    let _ = writeln!(s, "levels = {SINR_LEVELS}");
    let _ = writeln!(
        s,
        "mapping = level / {SINR_LEVELS} * (high - low) + low, clamped at both ends"
    );
    let _ = writeln!(s, "size = {} {}", field.nx, field.ny);
    s
}

pub fn write_count_map(map: &ContentCountMap, path: &Path) -> io::Result<()> {
    std::fs::write(path, count_map_pgm(map))
}

/// Writes the raster and a `.txt` sidecar next to it.
pub fn write_sinr_map(field: &SinrField, range_db: (f64, f64), path: &Path) -> io::Result<()> {
    std::fs::write(path, sinr_field_pgm(field, range_db))?;
    std::fs::write(path.with_extension("txt"), sinr_sidecar(field, range_db))
}

/// Parses a P2 raster back into `(width, height, maxval, pixels)`.
pub fn read_pgm(text: &str) -> Option<(usize, usize, u32, Vec<u32>)> {
    let mut tokens = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(str::split_whitespace);
    if tokens.next()? != "P2" {
        return None;
    }
    let nx = tokens.next()?.parse().ok()?;
    let ny = tokens.next()?.parse().ok()?;
    let maxval = tokens.next()?.parse().ok()?;
    let pixels: Vec<u32> = tokens.map(|t| t.parse().ok()).collect::<Option<_>>()?;
    (pixels.len() == nx * ny).then_some((nx, ny, maxval, pixels))
}
