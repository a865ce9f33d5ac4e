//! RIFF/WAVE decoding and encoding.
//!
//! Decodes integer PCM (8/16/24/32 bit) and IEEE float-32, mono or stereo.
//! Integer samples are scaled by `1 / 2^(bits-1)` (8-bit data is unsigned and
//! re-centred on 128 first); stereo frames are mixed to mono by their mean.

use std::fs;
use std::path::Path;

use super::{AudioClip, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Sample encodings `encode_wav` can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm8,
    Pcm16,
    Pcm24,
    Pcm32,
    Float32,
}

impl WavEncoding {
    fn bits(self) -> u16 {
        match self {
            WavEncoding::Pcm8 => 8,
            WavEncoding::Pcm16 => 16,
            WavEncoding::Pcm24 => 24,
            WavEncoding::Pcm32 | WavEncoding::Float32 => 32,
        }
    }

    fn format_tag(self) -> u16 {
        match self {
            WavEncoding::Float32 => FORMAT_FLOAT,
            _ => FORMAT_PCM,
        }
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip, AudioError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| AudioError::io(path, e))?;
    parse_wav(&bytes)
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Format {
    tag: u16,
    channels: u16,
    rate: u32,
    block_align: u16,
    bits: u16,
}

pub fn parse_wav(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    let malformed = |m: &str| AudioError::MalformedContainer(m.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE magic"));
    }

    let mut fmt: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| malformed("chunk size runs past end of file"))?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed("fmt chunk shorter than 16 bytes"));
                }
                let mut tag = u16_at(body, 0);
                if tag == FORMAT_EXTENSIBLE {
                    if body.len() < 40 {
                        return Err(malformed("truncated WAVE_FORMAT_EXTENSIBLE header"));
                    }
                    // The sub-format GUID starts with the plain format code.
                    tag = u16_at(body, 24);
                }
                fmt = Some(Format {
                    tag,
                    channels: u16_at(body, 2),
                    rate: u32_at(body, 4),
                    block_align: u16_at(body, 12),
                    bits: u16_at(body, 14),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word aligned.
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| malformed("no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("no data chunk"))?;

    match fmt.tag {
        FORMAT_PCM => {
            if !matches!(fmt.bits, 8 | 16 | 24 | 32) {
                return Err(AudioError::UnsupportedEncoding(format!("{}-bit PCM", fmt.bits)));
            }
        }
        FORMAT_FLOAT => {
            if fmt.bits != 32 {
                return Err(AudioError::UnsupportedEncoding(format!("{}-bit float", fmt.bits)));
            }
        }
        other => {
            return Err(AudioError::UnsupportedEncoding(format!("format tag {other:#06x}")));
        }
    }
    if !(1..=2).contains(&fmt.channels) {
        return Err(AudioError::UnsupportedEncoding(format!("{} channels", fmt.channels)));
    }
    if fmt.rate == 0 {
        return Err(malformed("zero sample rate"));
    }
    let bytes_per_sample = (fmt.bits / 8) as usize;
    let frame_bytes = bytes_per_sample * fmt.channels as usize;
    if fmt.block_align as usize != frame_bytes {
        return Err(malformed("block align disagrees with channels and bit depth"));
    }

    let frames = data.len() / frame_bytes;
    if frames == 0 {
        return Err(AudioError::EmptyAudio);
    }

    let decode = |at: usize| -> f64 {
        let s = &data[at..at + bytes_per_sample];
        match (fmt.tag, fmt.bits) {
            (FORMAT_FLOAT, _) => {
                let v = f32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64;
                if v.is_finite() {
                    v.clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            }
            (_, 8) => (s[0] as f64 - 128.0) / 128.0,
            (_, 16) => i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0,
            (_, 24) => {
                let v = i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8;
                v as f64 / 8_388_608.0
            }
            _ => i32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64 / 2_147_483_648.0,
        }
    };

    let samples = (0..frames)
        .map(|f| {
            let base = f * frame_bytes;
            if fmt.channels == 1 {
                decode(base)
            } else {
                (decode(base) + decode(base + bytes_per_sample)) / 2.0
            }
        })
        .collect();

    Ok(AudioClip::new(samples, fmt.rate))
}

fn quantize(x: f64, bits: u16) -> i64 {
    let full = (1i64 << (bits - 1)) as f64;
    let v = (x * full).round();
    v.clamp(-full, full - 1.0) as i64
}

/// Encodes one or two equal-length channels into a complete WAV byte stream.
pub fn encode_wav(channels: &[&[f64]], sample_rate_hz: u32, enc: WavEncoding) -> Vec<u8> {
    assert!(!channels.is_empty() && channels.len() <= 2, "1 or 2 channels");
    let frames = channels[0].len();
    assert!(channels.iter().all(|c| c.len() == frames), "channel lengths differ");

    let n_ch = channels.len() as u16;
    let bits = enc.bits();
    let block_align = n_ch * bits / 8;
    let data_len = frames as u32 * block_align as u32;

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&enc.format_tag().to_le_bytes());
    out.extend_from_slice(&n_ch.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());

    for f in 0..frames {
        for ch in channels {
            let x = ch[f];
            match enc {
                WavEncoding::Pcm8 => out.push((quantize(x, 8) + 128) as u8),
                WavEncoding::Pcm16 => out.extend_from_slice(&(quantize(x, 16) as i16).to_le_bytes()),
                WavEncoding::Pcm24 => {
                    let v = quantize(x, 24) as i32;
                    out.extend_from_slice(&v.to_le_bytes()[..3]);
                }
                WavEncoding::Pcm32 => out.extend_from_slice(&(quantize(x, 32) as i32).to_le_bytes()),
                WavEncoding::Float32 => out.extend_from_slice(&(x as f32).to_le_bytes()),
            }
        }
    }
    if data_len % 2 == 1 {
        out.push(0);
    }
    out
}

/// Writes a mono clip as 16-bit PCM.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<(), AudioError> {
    let path = path.as_ref();
    let bytes = encode_wav(&[&clip.samples], clip.sample_rate_hz, WavEncoding::Pcm16);
    fs::write(path, bytes).map_err(|e| AudioError::io(path, e))
}
