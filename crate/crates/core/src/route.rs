//! Hash routing of document keys to storage partitions.

const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum RouteError {
    #[error("shard count must be at least 1")]
    ZeroShards,
}

/// 64-bit FNV-1a over raw bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET_BASIS, |hash, &b| (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Shard index for `key`: FNV-1a 64 of its UTF-8 bytes modulo `shard_count`.
pub fn route_key(key: &str, shard_count: usize) -> Result<usize, RouteError> {
    if shard_count == 0 {
        return Err(RouteError::ZeroShards);
    }
    Ok((fnv1a64(key.as_bytes()) % shard_count as u64) as usize)
}
