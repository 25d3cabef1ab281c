import random

import numpy as np
import pytest

from isolume.assets import (
    Sprite,
    builtin_atlas,
    extract_opacity_map,
    load_atlas,
    load_sprite,
    synth_sprite,
)
from isolume.procgen import hash_seed
from isolume.raster import Raster, write_png


def make_sprite(pixels):
    return Sprite(Raster(np.asarray(pixels, np.uint8)))


def test_load_sprite_identity_1x1(tmp_path):
    raster = Raster(np.full((1, 1, 4), 255, np.uint8))
    path = tmp_path / "white.png"
    write_png(raster, path)
    sprite = load_sprite(path)
    assert sprite.width == 1 and sprite.height == 1
    assert tuple(sprite.image.pixels[0, 0]) == (255, 255, 255, 255)
    assert sprite.anchor == (0, 0)


def test_load_sprite_identity_2x1(tmp_path):
    px = np.array([[[0, 0, 0, 0], [255, 0, 0, 255]]], np.uint8)
    path = tmp_path / "two.png"
    write_png(Raster(px), path)
    sprite = load_sprite(path)
    assert np.array_equal(sprite.image.pixels, px)


def test_load_sprite_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_sprite(tmp_path / "missing.png")
    bad = tmp_path / "garbage.png"
    bad.write_bytes(b"this is not a png")
    with pytest.raises(ValueError):
        load_sprite(bad)


def test_load_sprite_rgb_gets_opaque_alpha(tmp_path):
    from PIL import Image

    path = tmp_path / "rgb.png"
    Image.new("RGB", (2, 2), (10, 20, 30)).save(path)
    sprite = load_sprite(path)
    assert np.all(sprite.image.pixels[..., 3] == 255)
    assert tuple(sprite.image.pixels[0, 0, :3]) == (10, 20, 30)


def test_load_sprite_rejects_palette_png(tmp_path):
    from PIL import Image

    path = tmp_path / "indexed.png"
    Image.new("P", (2, 2)).save(path)
    with pytest.raises(ValueError):
        load_sprite(path)


def test_block_sprite_is_128():
    sprite = builtin_atlas().sprite("grass")
    assert sprite.width == 128 and sprite.height == 128


def test_png_round_trip_random(tmp_path):
    rng = np.random.default_rng(11)
    px = rng.integers(0, 256, (9, 7, 4), np.uint8)
    path = tmp_path / "rt.png"
    write_png(Raster(px), path)
    assert np.array_equal(load_sprite(path).image.pixels, px)


def test_opacity_all_opaque_threshold_zero():
    sprite = make_sprite(np.full((4, 4, 4), 255))
    assert extract_opacity_map(sprite, 0).mask.all()


def test_opacity_fully_transparent():
    px = np.zeros((3, 5, 4), np.uint8)
    sprite = make_sprite(px)
    for threshold in (0, 64, 255):
        assert not extract_opacity_map(sprite, threshold).mask.any()


def test_opacity_threshold_comparison():
    px = np.zeros((1, 4, 4), np.uint8)
    px[0, :, 3] = (0, 64, 128, 255)
    mask = extract_opacity_map(make_sprite(px), 64).mask
    assert mask.tolist() == [[False, False, True, True]]


def test_opacity_monotone_in_threshold():
    rng = random.Random(5)
    for _ in range(25):
        px = np.zeros((6, 6, 4), np.uint8)
        px[..., 3] = np.array(
            [[rng.randrange(256) for _ in range(6)] for _ in range(6)], np.uint8
        )
        sprite = make_sprite(px)
        t1 = rng.randrange(255)
        t2 = rng.randrange(t1, 256)
        low = extract_opacity_map(sprite, t1).mask
        high = extract_opacity_map(sprite, t2).mask
        assert not (high & ~low).any()  # raising the threshold never adds cells


def test_opacity_zero_threshold_counts_nonzero_alpha():
    rng = np.random.default_rng(3)
    px = rng.integers(0, 256, (8, 8, 4), np.uint8)
    om = extract_opacity_map(make_sprite(px), 0)
    assert om.true_count == int((px[..., 3] > 0).sum())


def test_synth_deterministic():
    state = hash_seed("sprites")
    a = synth_sprite("floor-block", state)
    b = synth_sprite("floor-block", state)
    assert np.array_equal(a.image.pixels, b.image.pixels)


def test_synth_bush_mixed_mask():
    om = extract_opacity_map(synth_sprite("bush", hash_seed("sprites")))
    assert 0 < om.true_count < om.width * om.height


def test_synth_dimensions_contract():
    s1 = synth_sprite("tree", hash_seed("one"))
    s2 = synth_sprite("tree", hash_seed("two"))
    assert (s1.width, s1.height) == (s2.width, s2.height) == (128, 128)


def test_synth_unknown_kind():
    with pytest.raises(ValueError):
        synth_sprite("volcano", hash_seed("x"))


def test_atlas_lookup_and_flags(atlas):
    assert atlas.entry("grass").is_floor
    assert not atlas.entry("bush").is_floor
    assert atlas.entry("hero").non_occluding
    with pytest.raises(KeyError):
        atlas.sprite("nope")


def test_atlas_directory_layout(tmp_path):
    root = tmp_path / "atlas"
    (root / "floor-block").mkdir(parents=True)
    (root / "bush").mkdir()
    write_png(builtin_atlas().sprite("grass").image, root / "floor-block" / "grass.png")
    write_png(builtin_atlas().sprite("bush").image, root / "bush" / "shrub.png")
    (root / "manifest.json").write_text('{"shrub": {"ax": 3, "ay": 4, "non_occluding": true}}')
    atlas = load_atlas(root)
    assert set(atlas.names()) == {"grass", "shrub"}
    assert atlas.sprite("shrub").anchor == (3, 4)
    assert atlas.entry("shrub").non_occluding
    assert atlas.entry("grass").is_floor


def test_anchor_must_be_inside():
    px = np.full((4, 4, 4), 255, np.uint8)
    with pytest.raises(ValueError):
        Sprite(Raster(px), anchor=(4, 0))


def test_zero_dimension_raster_rejected():
    with pytest.raises(ValueError):
        Raster(np.zeros((0, 4, 4), np.uint8))
    with pytest.raises(ValueError):
        Raster(np.zeros((4, 0, 4), np.uint8))


def test_png_reencode_is_byte_stable(tmp_path):
    rng = np.random.default_rng(77)
    raster = Raster(rng.integers(0, 256, (16, 16, 4), np.uint8))
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    write_png(raster, a)
    write_png(raster, b)
    assert a.read_bytes() == b.read_bytes()
