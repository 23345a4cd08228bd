//! Binary grid files: `BGRD`, version, ndim, dims, extents, `c128`, data.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::multiplier::GridFunction;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"BGRD";
const TAG: &[u8; 4] = b"c128";
pub const GRID_FORMAT_VERSION: u32 = 1;

fn io(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

/// Little-endian layout; values as `(re, im)` pairs of `f64`.
pub fn write_grid<W: Write>(mut w: W, g: &GridFunction) -> Result<()> {
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&GRID_FORMAT_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(g.dims.len() as u32).to_le_bytes()).map_err(io)?;
    for d in &g.dims {
        w.write_all(&(*d as u64).to_le_bytes()).map_err(io)?;
    }
    for l in &g.extents {
        w.write_all(&l.to_le_bytes()).map_err(io)?;
    }
    w.write_all(TAG).map_err(io)?;
    for v in &g.data {
        w.write_all(&v.re.to_le_bytes()).map_err(io)?;
        w.write_all(&v.im.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(io)?;
    Ok(b)
}

pub fn read_grid<R: Read>(mut r: R) -> Result<GridFunction> {
    if &take::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != GRID_FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let ndim = u32::from_le_bytes(take(&mut r)?) as usize;
    if ndim == 0 || ndim > 2 {
        return Err(Error::Format(format!("unsupported ndim {ndim}")));
    }
    let dims = (0..ndim)
        .map(|_| Ok(u64::from_le_bytes(take(&mut r)?) as usize))
        .collect::<Result<Vec<_>>>()?;
    let extents = (0..ndim)
        .map(|_| Ok(f64::from_le_bytes(take(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    if &take::<4, _>(&mut r)? != TAG {
        return Err(Error::Format("dtype tag is not c128".into()));
    }
    let len = dims
        .iter()
        .try_fold(1usize, |a, d| a.checked_mul(*d))
        .ok_or_else(|| Error::Format("dims overflow".into()))?;
    if len as u128 > crate::normcalc::DEFAULT_NODE_BUDGET {
        return Err(Error::Format(format!("{len} values exceed the grid budget")));
    }
    let data = (0..len)
        .map(|_| {
            let re = f64::from_le_bytes(take(&mut r)?);
            let im = f64::from_le_bytes(take(&mut r)?);
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest).map_err(io)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    GridFunction::new(dims, extents, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = GridFunction::from_fn(vec![3, 2], vec![1.5, 0.25], |x| Complex64::new(x[0], -x[1])).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &g).unwrap();
        assert_eq!(&buf[..4], b"BGRD");
        assert_eq!(buf.len(), 4 + 4 + 4 + 16 + 16 + 4 + 6 * 16);
        assert_eq!(read_grid(&buf[..]).unwrap(), g);
    }

    #[test]
    fn rejects_corruption() {
        let g = GridFunction::from_fn(vec![2], vec![1.0], |_| Complex64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &g).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_grid(&bad[..]), Err(Error::Format(_))));
        assert!(matches!(read_grid(&buf[..buf.len() - 3]), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_grid(&long[..]), Err(Error::Format(_))));
    }
}
