//! Mono WAV input and output (PCM16, PCM24, Float32).

use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AudioFormat {
    Pcm16,
    Pcm24,
    Float32,
}

impl AudioFormat {
    fn bits(self) -> u16 {
        match self {
            AudioFormat::Pcm16 => 16,
            AudioFormat::Pcm24 => 24,
            AudioFormat::Float32 => 32,
        }
    }

    fn full_scale(self) -> f64 {
        match self {
            AudioFormat::Pcm16 => 32768.0,
            AudioFormat::Pcm24 => 8_388_608.0,
            AudioFormat::Float32 => 1.0,
        }
    }
}

/// Mono audio. PCM samples are normalised to `[-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub format: AudioFormat,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    // the file is open, so any failure here is a bad or short header
    let mut reader = WavReader::new(BufReader::new(file)).map_err(|e| Error::Wav {
        path: path.into(),
        reason: format!("malformed header: {e}"),
    })?;
    let spec = reader.spec();
    let format = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => AudioFormat::Pcm16,
        (SampleFormat::Int, 24) => AudioFormat::Pcm24,
        (SampleFormat::Float, 32) => AudioFormat::Float32,
        (fmt, bits) => {
            return Err(Error::Wav {
                path: path.into(),
                reason: format!("unsupported codec: {bits}-bit {fmt:?}"),
            })
        }
    };
    if spec.channels > 1 {
        log::warn!("{}: {} channels, using channel 0", path.display(), spec.channels);
    }
    let channels = spec.channels as usize;
    let mut samples = Vec::with_capacity(reader.len() as usize / channels);
    let scale = 1.0 / format.full_scale();
    let mut fail_at = None;
    match format {
        AudioFormat::Float32 => {
            for (i, s) in reader.samples::<f32>().enumerate() {
                match s {
                    Ok(v) if i % channels == 0 => samples.push(v as f64),
                    Ok(_) => {}
                    Err(_) => {
                        fail_at = Some(i);
                        break;
                    }
                }
            }
        }
        _ => {
            for (i, s) in reader.samples::<i32>().enumerate() {
                match s {
                    Ok(v) if i % channels == 0 => samples.push(v as f64 * scale),
                    Ok(_) => {}
                    Err(_) => {
                        fail_at = Some(i);
                        break;
                    }
                }
            }
        }
    }
    if let Some(i) = fail_at {
        let start = data_offset(path).unwrap_or(0);
        let offset = start + (i as u64 - i as u64 % channels as u64) * (format.bits() as u64 / 8);
        return Err(Error::TruncatedWav {
            path: path.into(),
            offset,
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptyAudio { path: path.into() });
    }
    Ok(AudioBuffer {
        samples,
        sample_rate: spec.sample_rate,
        format,
    })
}

/// Write `buffer.samples` as a mono file in `format`. PCM output is rounded
/// and clipped to the integer range.
pub fn write_wav(path: impl AsRef<Path>, buffer: &AudioBuffer, format: AudioFormat) -> Result<()> {
    let path = path.as_ref();
    if let Some(index) = buffer.samples.iter().position(|v| !v.is_finite()) {
        return Err(srirnn_core::Error::NonFiniteInput { index }.into());
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: format.bits(),
        sample_format: match format {
            AudioFormat::Float32 => SampleFormat::Float,
            _ => SampleFormat::Int,
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    let full = format.full_scale();
    for &v in &buffer.samples {
        let r = match format {
            AudioFormat::Float32 => writer.write_sample(v as f32),
            _ => writer.write_sample((v * full).round().clamp(-full, full - 1.0) as i32),
        };
        r.map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(source) => Error::io(path, source),
        other => Error::Wav {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}

/// Byte offset of the first sample: walks the RIFF chunk list to `data`.
fn data_offset(path: &Path) -> Option<u64> {
    let mut f = File::open(path).ok()?;
    f.seek(SeekFrom::Start(12)).ok()?;
    let mut header = [0u8; 8];
    loop {
        f.read_exact(&mut header).ok()?;
        let size = u32::from_le_bytes(header[4..].try_into().ok()?) as u64;
        let here = f.stream_position().ok()?;
        if &header[..4] == b"data" {
            return Some(here);
        }
        f.seek(SeekFrom::Start(here + size + size % 2)).ok()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buffer(samples: Vec<f64>, format: AudioFormat) -> AudioBuffer {
        AudioBuffer {
            samples,
            sample_rate: 44_100,
            format,
        }
    }

    #[test]
    fn float_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.wav");
        let b = buffer(vec![0.25, -0.5, 0.1f32 as f64, 1.5], AudioFormat::Float32);
        write_wav(&path, &b, AudioFormat::Float32).unwrap();
        assert_eq!(read_wav(&path).unwrap(), b);
    }

    #[test]
    fn pcm_round_trip_within_one_lsb() {
        let dir = tempfile::tempdir().unwrap();
        for format in [AudioFormat::Pcm16, AudioFormat::Pcm24] {
            let path = dir.path().join("p.wav");
            let samples: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 0.9).collect();
            write_wav(&path, &buffer(samples.clone(), format), format).unwrap();
            let back = read_wav(&path).unwrap();
            assert_eq!(back.format, format);
            let lsb = 1.0 / format.full_scale();
            assert!(samples.iter().zip(&back.samples).all(|(a, b)| (a - b).abs() <= lsb));
        }
    }

    #[test]
    fn full_scale_pcm16_peak() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sine.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 48_000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for n in 0..480 {
            let v = (2.0 * std::f64::consts::PI * 1000.0 * n as f64 / 48_000.0).sin();
            w.write_sample((v * 32767.0).round() as i16).unwrap();
        }
        w.finalize().unwrap();
        let b = read_wav(&path).unwrap();
        let peak = b.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(peak, 32767.0 / 32768.0);
    }

    #[test]
    fn first_channel_of_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8_000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for n in 0..10i16 {
            w.write_sample(n * 100).unwrap();
            w.write_sample(-1000).unwrap();
        }
        w.finalize().unwrap();
        let b = read_wav(&path).unwrap();
        assert_eq!(b.samples.len(), 10);
        assert_eq!(b.samples[3], 300.0 / 32768.0);
    }

    #[test]
    fn truncated_file_names_offset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav(&path, &buffer(vec![0.1; 100], AudioFormat::Pcm16), AudioFormat::Pcm16).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 51]).unwrap();
        match read_wav(&path) {
            Err(Error::TruncatedWav { offset, .. }) => assert_eq!(offset, 44 + 74 * 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn garbage_and_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.wav");
        std::fs::write(&path, b"not a wave file at all").unwrap();
        assert!(matches!(read_wav(&path), Err(Error::Wav { .. })));
        write_wav(&path, &buffer(vec![], AudioFormat::Pcm16), AudioFormat::Pcm16).unwrap();
        assert!(matches!(read_wav(&path), Err(Error::EmptyAudio { .. })));
    }

    #[test]
    fn unsupported_codec() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u8.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 8_000,
            bits_per_sample: 8,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        match read_wav(&path) {
            Err(Error::Wav { reason, .. }) => assert!(reason.contains("unsupported codec")),
            other => panic!("{other:?}"),
        }
    }
}
