use wedgewave::harness::{
    cache_spectrum, load_spectrum, spectrum_with_cache, CacheStatus, SpectrumKey,
};
use wedgewave::net::TwoDNet;
use wedgewave::Error;

fn dim16() -> TwoDNet {
    let net = TwoDNet::symmetric(1.0, 2, 1, None).unwrap();
    assert_eq!(net.dim(), 16);
    net
}

#[test]
fn round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let net = dim16();
    let hash = cache_spectrum(&net, dir.path()).unwrap();
    let loaded = load_spectrum(dir.path(), &hash).unwrap();
    assert_eq!(loaded.dim, 16);
    assert_eq!(loaded.spectrum.len(), net.joint_spectrum().len());
    for (a, b) in loaded.spectrum.iter().zip(net.joint_spectrum()) {
        assert_eq!(a.key, b.key);
        assert_eq!(a.indices, b.indices);
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.momentum.to_bits(), b.momentum.to_bits());
    }
}

#[test]
fn hash_depends_on_spacing_and_caps() {
    let a = SpectrumKey::of(&dim16()).hash();
    let b = SpectrumKey::of(&TwoDNet::symmetric(0.5, 2, 1, None).unwrap()).hash();
    let c = SpectrumKey::of(&TwoDNet::symmetric(1.0, 2, 2, None).unwrap()).hash();
    assert_ne!(a, b);
    assert_ne!(a, c);
    assert_eq!(a, SpectrumKey::of(&dim16()).hash());
}

#[test]
fn flipped_byte_fails_the_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let net = dim16();
    let hash = cache_spectrum(&net, dir.path()).unwrap();
    let path = dir.path().join(format!("{hash}.json"));
    let mut bytes = std::fs::read(&path).unwrap();
    // A digit inside the payload, past the header line.
    let start = bytes.iter().position(|&b| b == b'\n').unwrap();
    let pos = start
        + bytes[start..]
            .iter()
            .position(|b| b.is_ascii_digit())
            .unwrap();
    bytes[pos] = if bytes[pos] == b'9' {
        b'8'
    } else {
        bytes[pos] + 1
    };
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(
        load_spectrum(dir.path(), &hash),
        Err(Error::Cache(_))
    ));
    assert!(matches!(
        spectrum_with_cache(&net, dir.path()),
        Err(Error::Cache(_))
    ));
}

#[test]
fn stale_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let net = dim16();
    let other = TwoDNet::symmetric(0.5, 2, 1, None).unwrap();
    let (want, theirs) = (
        SpectrumKey::of(&net).hash(),
        cache_spectrum(&other, dir.path()).unwrap(),
    );
    std::fs::rename(
        dir.path().join(format!("{theirs}.json")),
        dir.path().join(format!("{want}.json")),
    )
    .unwrap();
    assert!(matches!(
        load_spectrum(dir.path(), &want),
        Err(Error::StaleCache { .. })
    ));
    let (spec, status) = spectrum_with_cache(&net, dir.path()).unwrap();
    assert_eq!(status, CacheStatus::Stale);
    assert_eq!(spec, net.joint_spectrum());
    let (_, status) = spectrum_with_cache(&net, dir.path()).unwrap();
    assert_eq!(status, CacheStatus::Hit);
}

#[test]
fn miss_then_hit() {
    let dir = tempfile::tempdir().unwrap();
    let net = dim16();
    assert_eq!(
        spectrum_with_cache(&net, dir.path()).unwrap().1,
        CacheStatus::Miss
    );
    assert_eq!(
        spectrum_with_cache(&net, dir.path()).unwrap().1,
        CacheStatus::Hit
    );
}
