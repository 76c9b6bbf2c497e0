//! Binary field dump: `HFLD1\n`, a little-endian `u64` header length, a JSON
//! header `{"N":…,"M":…,"L":…}`, then `M^N` little-endian `f64` samples in
//! row-major order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Field, GridSpec};
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 6] = b"HFLD1\n";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    l: f64,
}

pub fn write_field<W: Write>(mut w: W, field: &Field) -> Result<()> {
    let spec = field.spec();
    let header = serde_json::to_vec(&Header {
        n: spec.dim(),
        m: spec.points(),
        l: spec.half_width(),
    })?;
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(header.len() as u64).to_le_bytes())?;
    w.write_all(&header)?;
    let mut body = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        body.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(Error::Format(format!("header length {len} is implausible")));
    }
    let mut header = vec![0u8; len];
    r.read_exact(&mut header)?;
    let header: Header = serde_json::from_slice(&header)?;
    let spec = GridSpec::new(header.n, header.l, header.m)?;
    let mut body = vec![0u8; 8 * spec.len()];
    r.read_exact(&mut body)?;
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Field::new(spec, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_is_bit_exact() {
        let s = GridSpec::new(1, 2.5, 16).unwrap();
        let f = Field::from_fn(s, |x| x[0]);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..6], b"HFLD1\n");
        let hlen = u64::from_le_bytes(buf[6..14].try_into().unwrap()) as usize;
        let header: serde_json::Value = serde_json::from_slice(&buf[14..14 + hlen]).unwrap();
        assert_eq!(header["N"], 1);
        assert_eq!(header["M"], 16);
        assert_eq!(header["L"], 2.5);
        assert_eq!(buf.len(), 14 + hlen + 16 * 8);
        let first = f64::from_le_bytes(buf[14 + hlen..22 + hlen].try_into().unwrap());
        assert_eq!(first, -2.5);
    }

    #[test]
    fn rejects_bad_magic() {
        let err = read_field(&b"HFLD2\n\0\0\0\0\0\0\0\0"[..]).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn rejects_truncated_body() {
        let s = GridSpec::new(1, 1.0, 16).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &Field::zeros(s)).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(read_field(&buf[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(vals in proptest::collection::vec(-1e6f64..1e6, 256)) {
            let s = GridSpec::new(2, 3.0, 16).unwrap();
            let f = Field::new(s, vals).unwrap();
            let mut buf = Vec::new();
            write_field(&mut buf, &f).unwrap();
            prop_assert_eq!(read_field(&buf[..]).unwrap(), f);
        }
    }
}
