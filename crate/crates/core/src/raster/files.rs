//! Condition file formats.
//!
//! - Depth: 16-bit grayscale PNG in 0.1 mm units (0 = background, saturating
//!   at ~6.55 m), or lossless float32 little-endian PFM.
//! - Segmentation: 8-bit palette PNG whose pixel value is the label.
//! - Keypoints: 24-bit RGB PNG.
//! - Tracklets: JSON `{n, frames, tracks: [{xy, vis}]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DepthMap, RasterError, RgbImage, SegMap, Tracklet};

/// Depth quantization step for PNG encoding: 0.1 mm.
pub const DEPTH_UNIT_M: f64 = 1e-4;

pub fn write_depth_png(path: &Path, depth: &DepthMap) -> Result<(), RasterError> {
    let mut enc = png::Encoder::new(
        BufWriter::new(File::create(path)?),
        depth.width as u32,
        depth.height as u32,
    );
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Sixteen);
    let mut writer = enc.write_header()?;
    let mut buf = Vec::with_capacity(depth.data.len() * 2);
    for &d in &depth.data {
        let q = (d as f64 / DEPTH_UNIT_M).round().clamp(0.0, 65535.0) as u16;
        buf.extend_from_slice(&q.to_be_bytes());
    }
    writer.write_image_data(&buf)?;
    Ok(())
}

pub fn read_depth_png(path: &Path) -> Result<DepthMap, RasterError> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or_default()];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(RasterError::BadImage(format!(
            "{}: expected 16-bit grayscale depth png",
            path.display()
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data = buf[..w * h * 2]
        .chunks_exact(2)
        .map(|c| (u16::from_be_bytes([c[0], c[1]]) as f64 * DEPTH_UNIT_M) as f32)
        .collect();
    Ok(DepthMap { width: w, height: h, data })
}

pub fn write_depth_pfm(path: &Path, depth: &DepthMap) -> Result<(), RasterError> {
    let mut out = BufWriter::new(File::create(path)?);
    // Negative scale marks little-endian samples; rows are bottom-to-top.
    write!(out, "Pf\n{} {}\n-1.0\n", depth.width, depth.height)?;
    for row in (0..depth.height).rev() {
        for col in 0..depth.width {
            out.write_all(&depth.at(row, col).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_depth_pfm(path: &Path) -> Result<DepthMap, RasterError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let bad = |m: &str| RasterError::BadImage(format!("{}: {m}", path.display()));

    // Header: three whitespace-terminated tokens.
    let mut pos = 0;
    let mut token = || -> Result<String, RasterError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(RasterError::BadImage("truncated pfm header".into()));
        }
        pos += 1; // single whitespace after the token
        Ok(String::from_utf8_lossy(&bytes[start..pos - 1]).into_owned())
    };
    if token()? != "Pf" {
        return Err(bad("not a grayscale pfm"));
    }
    let w: usize = token()?.parse().map_err(|_| bad("bad width"))?;
    let h: usize = token()?.parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = token()?.parse().map_err(|_| bad("bad scale"))?;
    if scale >= 0.0 {
        return Err(bad("big-endian pfm not supported"));
    }
    let body = &bytes[pos..];
    if body.len() < w * h * 4 {
        return Err(bad("truncated pfm body"));
    }
    let mut data = vec![0.0f32; w * h];
    for (k, c) in body[..w * h * 4].chunks_exact(4).enumerate() {
        let row = h - 1 - k / w;
        let col = k % w;
        data[row * w + col] = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
    }
    Ok(DepthMap { width: w, height: h, data })
}

/// Fixed 256-entry label palette: 0 black, 1 hand, then a deterministic hue cycle.
pub fn label_palette() -> [u8; 768] {
    let mut palette = [0u8; 768];
    palette[3..6].copy_from_slice(&[240, 90, 70]); // label 1: hand
    for label in 2..256 {
        let hue = (label as f64 * 0.6180339887498949).fract() * 360.0;
        let rgb = hsv_to_rgb(hue, 0.75, 0.95);
        palette[3 * label..3 * label + 3].copy_from_slice(&rgb);
    }
    palette
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 % 6 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [((r + m) * 255.0) as u8, ((g + m) * 255.0) as u8, ((b + m) * 255.0) as u8]
}

pub fn write_seg_png(path: &Path, seg: &SegMap) -> Result<(), RasterError> {
    let mut enc = png::Encoder::new(
        BufWriter::new(File::create(path)?),
        seg.width as u32,
        seg.height as u32,
    );
    enc.set_color(png::ColorType::Indexed);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_palette(label_palette().to_vec());
    let mut writer = enc.write_header()?;
    writer.write_image_data(&seg.data)?;
    Ok(())
}

pub fn read_seg_png(path: &Path) -> Result<SegMap, RasterError> {
    let mut decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    // Keep raw palette indices instead of expanding to RGB.
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or_default()];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Indexed || info.bit_depth != png::BitDepth::Eight {
        return Err(RasterError::BadImage(format!(
            "{}: expected 8-bit palette segmentation png",
            path.display()
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    buf.truncate(w * h);
    Ok(SegMap { width: w, height: h, data: buf })
}

pub fn write_rgb_png(path: &Path, img: &RgbImage) -> Result<(), RasterError> {
    let mut enc = png::Encoder::new(
        BufWriter::new(File::create(path)?),
        img.width as u32,
        img.height as u32,
    );
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header()?;
    writer.write_image_data(&img.data)?;
    Ok(())
}

pub fn read_rgb_png(path: &Path) -> Result<RgbImage, RasterError> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or_default()];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(RasterError::BadImage(format!("{}: expected 8-bit rgb png", path.display())));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    buf.truncate(w * h * 3);
    Ok(RgbImage { width: w, height: h, data: buf })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackletFile {
    schema: u32,
    n: usize,
    frames: usize,
    tracks: Vec<TrackRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackRecord {
    xy: Vec<[f64; 2]>,
    vis: Vec<bool>,
}

pub fn save_tracklets(path: &Path, tracks: &[Tracklet]) -> Result<(), RasterError> {
    let frames = tracks.first().map_or(0, Tracklet::len);
    let file = TrackletFile {
        schema: 1,
        n: tracks.len(),
        frames,
        tracks: tracks
            .iter()
            .map(|t| TrackRecord { xy: t.points.clone(), vis: t.visibility.clone() })
            .collect(),
    };
    std::fs::write(path, serde_json::to_vec(&file)?)?;
    Ok(())
}

pub fn load_tracklets(path: &Path) -> Result<Vec<Tracklet>, RasterError> {
    let file: TrackletFile = serde_json::from_slice(&std::fs::read(path)?)?;
    if file.schema != 1 {
        return Err(RasterError::BadImage(format!(
            "{}: unsupported tracklet schema {}",
            path.display(),
            file.schema
        )));
    }
    for (i, t) in file.tracks.iter().enumerate() {
        if t.xy.len() != file.frames || t.vis.len() != file.frames {
            return Err(RasterError::BadImage(format!(
                "{}: track {i} length differs from frame count",
                path.display()
            )));
        }
    }
    Ok(file
        .tracks
        .into_iter()
        .map(|t| Tracklet { points: t.xy, visibility: t.vis })
        .collect())
}
