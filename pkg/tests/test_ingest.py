import datetime
import io

import httpx
import numpy as np
import pytest
from PIL import Image

from storm_forecast.errors import ImageLoadError, IngestError, IngestFormatError, UnsupportedImageFormat
from storm_forecast.ingest import (
    ImageManifest,
    KpDay,
    SilsoRecord,
    SwpcForecastRecord,
    build_manifest,
    cache_path,
    date_range_days,
    fetch_sdo,
    format_kp_day,
    format_silso_record,
    format_swpc_record,
    kp_to_ap,
    label_day,
    load_image,
    parse_kp_file,
    parse_kp_line,
    parse_kp_text,
    parse_silso,
    parse_silso_line,
    parse_silso_text,
    parse_swpc,
    parse_swpc_text,
    snap_kp,
)
from storm_forecast.ingest.fetch import _write_png
from storm_forecast.models.storm import StormClass

D = datetime.date


# ---- Kp ----

def test_parse_numeric_kp_fixture(fixture_path):
    days = parse_kp_file(fixture_path("kp_sample.txt"))
    assert [k.date for k in days] == [D(2015, 3, d) for d in range(15, 20)]
    assert [k.max_kp for k in days] == [3.33, 4.33, 8.0, 5.0, 4.67]
    assert [label_day(k) for k in days] == [StormClass.NO_STORM, StormClass.NO_STORM, StormClass.STORM,
                                            StormClass.STORM, StormClass.NO_STORM]


def test_parse_thirds_kp_fixture(fixture_path):
    days = parse_kp_file(fixture_path("kp_thirds.txt"))
    assert days[0].values == (4.67, 5.33, 6.67, 7.67, 7.33, 7.67, 8.0, 7.67)
    assert days[1].max_kp == 5.0
    assert label_day(days[1]) is StormClass.STORM


def test_storm_threshold_is_inclusive():
    assert label_day(KpDay(D(2015, 1, 1), (5.0,) + (0.0,) * 7)) is StormClass.STORM
    assert label_day(KpDay(D(2015, 1, 1), (4.67,) + (0.0,) * 7)) is StormClass.NO_STORM
    assert snap_kp(4.666) == 4.67


def test_kp_day_validation():
    with pytest.raises(IngestError):
        KpDay(D(2015, 1, 1), (1.0,) * 7)
    with pytest.raises(IngestError):
        KpDay(D(2015, 1, 1), (9.5,) + (0.0,) * 7)


def test_kp_line_errors():
    with pytest.raises(ValueError):
        parse_kp_line("2015 03 15 1 2 3")
    with pytest.raises(ValueError, match="missing"):
        parse_kp_line("2015 03 15 1 1.5 2479 17 -1 2 2 2 2 2 2 2")
    with pytest.raises(ValueError):
        parse_kp_line("2015 03 15 5- 5+ 7- 8- 7+ 8- 8o 9+")


def test_format_kp_day_round_trip():
    day = KpDay(D(2015, 3, 17), (4.67, 5.0, 5.33, 0.0, 9.0, 1.33, 2.67, 3.0))
    line = format_kp_day(day)
    assert parse_kp_line(line) == day
    assert line.split()[3:7] == ["30391", "30391.5", "2477", "26"]
    assert kp_to_ap(5.0) == 48


def test_kp_duplicates_are_rejected():
    day = "2015 03 {:02d} 1o 1o 1o 1o 1o 1o 1o 1o"
    lines = [day.format(d) for d in range(1, 11)] + [day.format(4)]
    result = parse_kp_text("\n".join(lines))
    assert len(result.records) == 10
    assert len(result.issues) == 1
    assert "duplicate date" in result.issues[0].reason


def test_kp_file_with_too_many_bad_lines(tmp_path):
    path = tmp_path / "kp.txt"
    good = [f"2015 03 {d:02d} 1o 1o 1o 1o 1o 1o 1o 1o" for d in range(1, 6)]
    path.write_text("\n".join(good + ["this is not a Kp line at all ok"]))
    with pytest.raises(IngestFormatError):
        parse_kp_file(str(path))


def test_kp_file_missing(tmp_path):
    with pytest.raises(IngestError):
        parse_kp_file(str(tmp_path / "absent.txt"))


# ---- SILSO ----

def test_parse_silso_fixture(fixture_path):
    records = parse_silso(fixture_path("silso_sample.csv"))
    assert len(records) == 5
    assert records[0] == SilsoRecord(D(2015, 3, 15), 62.0, provisional=False)
    assert records[3].is_missing
    assert records[4].provisional


def test_silso_line_errors():
    with pytest.raises(ValueError):
        parse_silso_line("2015;03;15;2015.201;62")
    with pytest.raises(ValueError):
        parse_silso_line("2015;03;15;2015.201;  62;  5.9;  32;7")
    with pytest.raises(IngestError):
        SilsoRecord(D(2015, 3, 15), -3.0)


@pytest.mark.parametrize("record", [
    SilsoRecord(D(2016, 2, 29), 62.0),
    SilsoRecord(D(2015, 3, 18), None),
    SilsoRecord(D(2021, 4, 30), 12.5, provisional=True),
])
def test_format_silso_record_round_trip(record):
    assert parse_silso_line(format_silso_record(record)) == record


# ---- SWPC ----

def test_parse_swpc_fixture(fixture_path):
    records = parse_swpc(fixture_path("swpc_sample.txt"))
    # the 1230 re-issue of Mar 16 is dropped in favour of the 0030 product
    assert records == [SwpcForecastRecord(D(2015, 3, 16), 5.0), SwpcForecastRecord(D(2015, 3, 17), 4.0)]
    assert records[0].target_date == D(2015, 3, 17)
    assert records[0].predicted_class() is StormClass.STORM
    assert records[1].predicted_class() is StormClass.NO_STORM


def test_swpc_malformed_products_become_issues(fixture_path):
    with open(fixture_path("swpc_sample.txt")) as f:
        text = f.read()
    broken = ":Issued: 2015 Mar 18 0030 UTC\nNo table here.\n"
    result = parse_swpc_text(text + "\n" + broken)
    assert len(result.records) == 2
    assert result.candidate_lines == 4
    assert "breakdown" in result.issues[0].reason


def test_swpc_archive_mostly_malformed(tmp_path):
    path = tmp_path / "swpc.txt"
    path.write_text(":Issued: 2015 Mar 18 0030 UTC\nnothing\n:Issued: 2015 Mar 19 0030 UTC\nnothing\n")
    with pytest.raises(IngestFormatError):
        parse_swpc(str(path))


def test_swpc_year_rollover():
    record = SwpcForecastRecord(D(2015, 12, 31), 6.0)
    assert parse_swpc_text(format_swpc_record(record)).records == [record]


def test_format_swpc_record_round_trip():
    records = [SwpcForecastRecord(D(2015, 3, 5), 3.67), SwpcForecastRecord(D(2015, 3, 6), 5.0)]
    text = "\n".join(format_swpc_record(r) for r in records)
    assert parse_swpc_text(text).records == records


# ---- images ----

def gradient_pixels(size):
    ramp = np.linspace(0, 255, size).astype(np.uint8)
    return np.tile(ramp, (size, 1))


def test_load_png_grayscale(tmp_path):
    pixels = gradient_pixels(64)
    path = tmp_path / "sun.png"
    Image.fromarray(pixels).save(path)
    img = load_image(str(path), working_size=64)
    assert img.shape == (64, 64)
    assert np.array_equal(img.pixels, pixels.astype(np.float64))


def test_load_jpeg_rgb_uses_luma(tmp_path):
    rgb = np.zeros((32, 32, 3), dtype=np.uint8)
    rgb[..., 0] = 200
    path = tmp_path / "sun.jpg"
    Image.fromarray(rgb).save(path, quality=100)
    img = load_image(str(path), working_size=32)
    assert img.pixels.mean() == pytest.approx(0.299 * 200, abs=3.0)


def test_load_image_resamples_by_block_mean(tmp_path):
    pixels = np.zeros((128, 128), dtype=np.uint8)
    pixels[::2, ::2] = 200
    path = tmp_path / "big.png"
    Image.fromarray(pixels).save(path)
    img = load_image(str(path), working_size=64)
    assert img.shape == (64, 64)
    assert np.allclose(img.pixels, 50.0)


def test_load_image_errors(tmp_path):
    with pytest.raises(ImageLoadError, match="not found"):
        load_image(str(tmp_path / "absent.png"))

    gif = tmp_path / "sun.gif"
    Image.fromarray(gradient_pixels(16)).save(gif)
    with pytest.raises(UnsupportedImageFormat):
        load_image(str(gif), working_size=16)

    junk = tmp_path / "junk.png"
    junk.write_bytes(b"definitely not an image")
    with pytest.raises(ImageLoadError):
        load_image(str(junk))

    buffer = io.BytesIO()
    Image.fromarray(gradient_pixels(64)).save(buffer, format="PNG")
    truncated = tmp_path / "truncated.png"
    truncated.write_bytes(buffer.getvalue()[: len(buffer.getvalue()) // 2])
    with pytest.raises(ImageLoadError):
        load_image(str(truncated), working_size=64)


# ---- manifest ----

def touch_png(path):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(gradient_pixels(8)).save(path)


def test_build_manifest_flat_and_cache_layouts(tmp_path):
    touch_png(tmp_path / "20150316_b.png")
    touch_png(tmp_path / "20150316_a.png")
    touch_png(tmp_path / "20150317_hmi.jpg")
    touch_png(tmp_path / "2015" / "0318.png")
    (tmp_path / "notes.txt").write_text("x")
    (tmp_path / "2015" / "readme").write_text("x")

    manifest = build_manifest(str(tmp_path))
    assert manifest.dates() == [D(2015, 3, 16), D(2015, 3, 17), D(2015, 3, 18)]
    assert manifest.entries[D(2015, 3, 16)].endswith("20150316_a.png")
    assert manifest.entries[D(2015, 3, 18)] == cache_path(str(tmp_path), D(2015, 3, 18))
    assert manifest.ignored == 2


def test_build_manifest_missing_directory(tmp_path):
    assert len(build_manifest(str(tmp_path / "absent"))) == 0


def test_manifest_save_and_load(tmp_path):
    manifest = ImageManifest(entries={D(2015, 3, 16): "a.png"}, gaps=[D(2015, 3, 17)])
    path = tmp_path / "manifest.json"
    manifest.save(str(path))
    loaded = ImageManifest.load(str(path))
    assert loaded.entries == manifest.entries
    assert loaded.gaps == manifest.gaps
    with pytest.raises(IngestError):
        ImageManifest.load(str(tmp_path / "absent.json"))


# ---- fetch ----

BASE = "https://archive.test/browse"


def jpeg_bytes():
    buffer = io.BytesIO()
    Image.fromarray(gradient_pixels(32)).save(buffer, format="JPEG")
    return buffer.getvalue()


class FakeArchive:
    """Serves directory listings and image files from dicts, recording every request."""

    def __init__(self, listings):
        self.listings = listings
        self.requests = []
        self.image = jpeg_bytes()

    def handler(self, request: httpx.Request) -> httpx.Response:
        url = str(request.url)
        self.requests.append(url)
        if url.endswith("/"):
            names = self.listings.get(url[len(BASE):])
            if names is None:
                return httpx.Response(404)
            body = "".join(f'<a href="{n}">{n}</a>\n' for n in names)
            return httpx.Response(200, text=f"<html><body>{body}</body></html>")
        return httpx.Response(200, content=self.image)

    def transport(self):
        return httpx.MockTransport(self.handler)


def test_date_range_days():
    assert date_range_days(D(2015, 2, 27), D(2015, 3, 2)) == \
        [D(2015, 2, 27), D(2015, 2, 28), D(2015, 3, 1), D(2015, 3, 2)]
    with pytest.raises(IngestError):
        date_range_days(D(2015, 3, 2), D(2015, 3, 1))


def test_fetch_sdo_selects_and_caches(tmp_path):
    archive = FakeArchive({
        "/2015/03/16/": ["20150316_000012_1024_HMIIF.jpg", "20150316_060000_1024_HMIIF.jpg",
                         "20150316_213000_1024_HMIIF.jpg", "20150316_231500_1024_HMIIF.jpg",
                         "20150316_000000_1024_HMIB.jpg"],
        "/2015/03/17/": ["20150317_043000_1024_HMIIF.jpg"],
    })
    manifest = fetch_sdo((D(2015, 3, 16), D(2015, 3, 18)), str(tmp_path), base_url=BASE,
                         transport=archive.transport(), concurrency=2)

    assert manifest.dates() == [D(2015, 3, 16), D(2015, 3, 17)]
    assert manifest.gaps == [D(2015, 3, 18)]
    downloads = sorted(u for u in archive.requests if u.endswith(".jpg"))
    assert downloads == [f"{BASE}/2015/03/16/20150316_000012_1024_HMIIF.jpg",
                         f"{BASE}/2015/03/16/20150316_231500_1024_HMIIF.jpg"]
    with Image.open(cache_path(str(tmp_path), D(2015, 3, 17))) as cached:
        assert cached.format == "PNG"


def test_fetch_sdo_skips_cached_days(tmp_path):
    for d in (16, 17):
        touch_png(tmp_path.joinpath(*cache_path("", D(2015, 3, d)).split("/")))
    archive = FakeArchive({})
    manifest = fetch_sdo((D(2015, 3, 16), D(2015, 3, 17)), str(tmp_path), base_url=BASE,
                         transport=archive.transport())
    assert len(manifest) == 2
    assert archive.requests == []


def test_fetch_sdo_offline(tmp_path):
    with pytest.raises(IngestError, match="offline"):
        fetch_sdo((D(2015, 3, 16), D(2015, 3, 17)), str(tmp_path), offline=True)

    touch_png(tmp_path.joinpath(*cache_path("", D(2015, 3, 16)).split("/")))
    manifest = fetch_sdo((D(2015, 3, 16), D(2015, 3, 17)), str(tmp_path), offline=True)
    assert manifest.dates() == [D(2015, 3, 16)]
    assert manifest.gaps == [D(2015, 3, 17)]


def test_fetch_sdo_server_errors_become_gaps(tmp_path):
    transport = httpx.MockTransport(lambda request: httpx.Response(500))
    manifest = fetch_sdo((D(2015, 3, 16), D(2015, 3, 16)), str(tmp_path), base_url=BASE, transport=transport)
    assert len(manifest) == 0
    assert manifest.gaps == [D(2015, 3, 16)]


# ---- robustness ----

def mutate(rng, data: bytes) -> bytes:
    buf = bytearray(data)
    for _ in range(int(rng.integers(1, 12))):
        op = rng.integers(0, 3)
        pos = int(rng.integers(0, len(buf) + 1))
        if op == 0 and buf:
            buf[min(pos, len(buf) - 1)] = int(rng.integers(0, 256))
        elif op == 1:
            buf[pos:pos] = bytes(rng.integers(0, 256, size=int(rng.integers(1, 8))).tolist())
        elif buf:
            del buf[pos:pos + int(rng.integers(1, 20))]
    return bytes(buf)


@pytest.mark.parametrize("parse,fixture", [
    (parse_kp_text, "kp_sample.txt"),
    (parse_silso_text, "silso_sample.csv"),
    (parse_swpc_text, "swpc_sample.txt"),
])
def test_text_parsers_survive_arbitrary_bytes(parse, fixture, fixture_path):
    rng = np.random.default_rng(17)
    with open(fixture_path(fixture), "rb") as f:
        sample = f.read()
    for trial in range(1000):
        if trial % 2:
            data = mutate(rng, sample)
        else:
            data = bytes(rng.integers(0, 256, size=int(rng.integers(0, 400))).tolist())
        result = parse(data.decode("utf-8", errors="replace"))
        assert len(result.issues) <= result.candidate_lines


def test_failed_png_write_leaves_no_temp_file(tmp_path, monkeypatch):
    buffer = io.BytesIO()
    Image.new("L", (8, 8), 200).save(buffer, format="PNG")
    path = str(tmp_path / "2015" / "0317.png")

    def broken_save(self, fp, *args, **kwargs):
        with open(fp, "wb") as f:
            f.write(b"partial")
        raise OSError("No space left on device")

    monkeypatch.setattr(Image.Image, "save", broken_save)
    with pytest.raises(IngestError, match="could not be decoded"):
        _write_png(buffer.getvalue(), path)
    assert list((tmp_path / "2015").iterdir()) == []


def test_undecodable_download_clears_stale_temp_file(tmp_path):
    (tmp_path / ".0317.png.tmp").write_bytes(b"left over")
    with pytest.raises(IngestError):
        _write_png(b"not an image", str(tmp_path / "0317.png"))
    assert list(tmp_path.iterdir()) == []
