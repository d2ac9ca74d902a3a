import json

import numpy as np

from primeends import RegionSet, build_gallery
from primeends import examples
from primeends.serialize import (
    chain_from_dict,
    chain_to_dict,
    domain_from_dict,
    domain_to_dict,
    dumps_json,
    load_domain,
    region_from_dict,
    region_to_dict,
    rle_decode_mask,
    rle_encode_mask,
    save_domain,
    write_csv,
)


def test_rle_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(10):
        mask = rng.random((13, 17)) < 0.4
        enc = rle_encode_mask(mask)
        assert (rle_decode_mask(enc, mask.shape) == mask).all()
    empty = np.zeros((4, 5), dtype=bool)
    assert (rle_decode_mask(rle_encode_mask(empty), (4, 5)) == empty).all()
    full = np.ones((4, 5), dtype=bool)
    assert (rle_decode_mask(rle_encode_mask(full), (4, 5)) == full).all()


def test_domain_roundtrip(slit100):
    d = domain_to_dict(slit100)
    back = domain_from_dict(d)
    assert (back.open_mask == slit100.open_mask).all()
    assert (back.blocked_north == slit100.blocked_north).all()
    assert (back.blocked_east == slit100.blocked_east).all()
    assert back.spec == slit100.spec
    assert back.name == slit100.name


def test_domain_roundtrip_with_marks():
    comb = build_gallery("topologist_comb", 2.0 ** -7, {"depth": 5})
    back = domain_from_dict(domain_to_dict(comb))
    assert (back.untrusted_mask == comb.untrusted_mask).all()
    pins = build_gallery("shrinking_pins", 1 / 128, {"depth": 5})
    back2 = domain_from_dict(domain_to_dict(pins))
    assert (back2.debris_mask == pins.debris_mask).all()


def test_region_roundtrip(square64):
    reg = RegionSet.from_rect(square64, 0.2, 0.7, 0.1, 0.5)
    back = region_from_dict(square64, region_to_dict(reg))
    assert (back.sel == reg.sel).all()


def test_chain_roundtrip(square128):
    chain = examples.unit_square_bottom_balls(square128, 5)
    d = chain_to_dict(chain)
    back = chain_from_dict(square128, d)
    assert back.depth == chain.depth
    for k in range(chain.depth):
        assert (back.region(k).sel == chain.region(k).sel).all()
        assert back.scale(k) == chain.scale(k)
    assert back.anchor.position == chain.anchor.position


def test_json_bytes_stable(square64):
    a = dumps_json(domain_to_dict(square64))
    b = dumps_json(domain_to_dict(square64))
    assert a == b
    assert json.loads(a)["grid"]["nx"] == square64.spec.nx


def test_save_load_file(tmp_path, square64):
    p = save_domain(tmp_path / "dom.json", square64)
    again = load_domain(p)
    assert again.n_cells == square64.n_cells


def test_write_csv_formats(tmp_path):
    p = write_csv(tmp_path / "x.csv", ["a", "b"], [(1, 0.5), (2, 1.0 / 3.0)])
    text = p.read_text()
    assert text.splitlines()[0] == "a,b"
    assert repr(1.0 / 3.0) in text
