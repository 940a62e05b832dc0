import dataclasses
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from p2pvirus.errors import ConfigError
from p2pvirus.malware import (
    IntRange,
    OrdinalLevel,
    SharedFile,
    VirusProfile,
    builtin_catalog,
    compare_catalog,
    find_profile,
    parse_catalog,
    plant_copies,
    score_profile,
    serialize_catalog,
    spoof_hit,
)

CATALOG = builtin_catalog()


def profile(name):
    return find_profile(CATALOG, name)


class TestCatalog:
    def test_seven_named_profiles(self):
        assert [p.name for p in CATALOG] == [
            "Swen", "Fizzer", "Mandragore", "Lirva", "Benjamin", "Lolol.a", "Magic Eight Ball",
        ]

    def test_swen_table(self):
        swen = profile("Swen")
        assert swen.infection_nodes == IntRange(1000)
        assert swen.damage_intensity is OrdinalLevel.MEDIUM
        assert swen.removal is OrdinalLevel.HIGH
        assert swen.author == "John Canavan"
        assert "W32/Gibe-F [Sophos]" in swen.aliases

    def test_mandragore_table(self):
        m = profile("Mandragore")
        assert m.infection_nodes == IntRange(0, 49)
        assert m.site_count == IntRange(0, 2)
        assert m.removal is OrdinalLevel.LOW
        assert m.spoofs_query_hits

    def test_benjamin_table(self):
        b = profile("Benjamin")
        assert b.damage_intensity is OrdinalLevel.HIGH
        assert b.distribution_intensity is OrdinalLevel.LOW
        assert b.copies_per_infection == 100

    def test_lirva_disguise_names(self):
        assert profile("Lirva").disguise_filenames[:3] == ("Resume.exe", "Download.exe", "MSO-Patch-0071.exe")
        assert len(profile("Lirva").disguise_filenames) == 10
        assert profile("Lirva").disguise_source == "published"

    def test_magic_eight_ball_is_unreported_trojan(self):
        m = profile("Magic Eight Ball")
        assert m.kind == "Trojan"
        assert m.author is None
        assert m.disguise_filenames == ("eightball2.zip",)

    def test_only_mandragore_spoofs(self):
        assert [p.name for p in CATALOG if p.spoofs_query_hits] == ["Mandragore"]

    def test_round_trip(self):
        assert parse_catalog(serialize_catalog(CATALOG)) == CATALOG

    def test_parse_rejects_unknown_field(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_catalog("name: X\ncolour: red\ndisguise_filenames: a.exe\n")

    def test_parse_rejects_duplicate_names(self):
        block = "name: X\ndisguise_filenames: a.exe\n"
        with pytest.raises(ConfigError):
            parse_catalog(block + "\n" + block)

    def test_bad_range(self):
        with pytest.raises(ConfigError):
            IntRange(10, 2)


class TestScoring:
    def test_swen(self):
        assert score_profile(profile("Swen")) == (2, 3, 3, 1, 3, 3, 3, 1)

    def test_mandragore(self):
        s = score_profile(profile("Mandragore"))
        assert (s.infections, s.source_sites, s.geographical_distribution) == (1, 1, 1)

    def test_benjamin(self):
        s = score_profile(profile("Benjamin"))
        assert (s.damage, s.distribution) == (3, 1)

    def test_magic_eight_ball_all_unknown(self):
        assert score_profile(profile("Magic Eight Ball")) == (0,) * 8

    @pytest.mark.parametrize("nodes, expected", [((0, 49), 1), ((50, 999), 2), ((49, 50), 1), ((1000, None), 3)])
    def test_infection_buckets(self, nodes, expected):
        p = dataclasses.replace(profile("Swen"), infection_nodes=IntRange(*nodes))
        assert score_profile(p).infections == expected

    def test_compare_builtin(self):
        matrix = compare_catalog(CATALOG)
        assert matrix.shape == (7, 8)
        assert matrix.names[0] == "Swen"

    def test_compare_single_and_duplicate(self):
        swen = profile("Swen")
        assert compare_catalog([swen]).scores.tolist() == [list(score_profile(swen))]
        twice = compare_catalog([swen, swen]).scores
        assert np.array_equal(twice[0], twice[1])

    def test_compare_empty(self):
        with pytest.raises(ConfigError):
            compare_catalog([])


levels = st.one_of(st.none(), st.sampled_from(list(OrdinalLevel)))
ranges = st.one_of(
    st.none(),
    st.builds(lambda lo, span: IntRange(lo, None if span is None else lo + span),
              st.integers(0, 5000), st.one_of(st.none(), st.integers(0, 5000))),
)
ORDINAL_FIELDS = ("untamed_level", "geo_distribution", "threat_restraint", "removal",
                  "damage_intensity", "distribution_intensity")


@st.composite
def profiles(draw):
    kwargs = {f: draw(levels) for f in ORDINAL_FIELDS}
    return VirusProfile(name="X", disguise_filenames=("a.exe",), infection_nodes=draw(ranges),
                        site_count=draw(ranges), **kwargs)


@given(profiles())
def test_scores_bounded(p):
    s = score_profile(p)
    assert len(s) == 8 and all(v in (0, 1, 2, 3) for v in s)


@given(profiles(), st.sampled_from(ORDINAL_FIELDS + ("infection_nodes", "site_count")), st.integers(1, 3000))
def test_raising_a_field_never_lowers_a_score(p, name, bump):
    value = getattr(p, name)
    if name in ("infection_nodes", "site_count"):
        raised = IntRange(bump) if value is None else IntRange(value.lower + bump)
    else:
        raised = OrdinalLevel.LOW if value is None else OrdinalLevel(min(3, value + 1))
    before, after = score_profile(p), score_profile(dataclasses.replace(p, **{name: raised}))
    assert all(b <= a for b, a in zip(before, after))


class TestPlantCopies:
    def test_empty_folder_gets_distinct_disguises(self, rng):
        folder = plant_copies([], dataclasses.replace(profile("Swen"), copies_per_infection=3), rng)
        assert len(folder) == 3
        assert len({f.name for f in folder}) == 3
        assert all(f.infected and f.profile == "Swen" for f in folder)
        assert {f.name for f in folder} <= set(profile("Swen").disguise_filenames)

    def test_existing_files_untouched(self, rng):
        benign = [SharedFile("a.mp3"), SharedFile("b.avi")]
        folder = plant_copies(list(benign), dataclasses.replace(profile("Fizzer"), copies_per_infection=1), rng)
        assert len(folder) == 3
        assert folder[:2] == benign

    def test_more_copies_than_names_get_suffixes(self, rng):
        p = VirusProfile("T", disguise_filenames=("a.exe", "b.exe", "c.exe"), copies_per_infection=5)
        names = [f.name for f in plant_copies([], p, rng)]
        assert len(names) == len(set(names)) == 5
        assert set(names[:3]) == {"a.exe", "b.exe", "c.exe"}
        assert all(" (2)" in n and n.endswith(".exe") for n in names[3:])

    @given(st.integers(1, 250), st.integers(0, 10), st.integers(0, 10**6))
    def test_adds_exactly_n(self, copies, existing, seed):
        p = dataclasses.replace(profile("Lirva"), copies_per_infection=copies)
        before = [SharedFile(f"f{k}.mp3") for k in range(existing)]
        after = plant_copies(list(before), p, random.Random(seed))
        assert len(after) == existing + copies
        assert after[:existing] == before
        assert len({f.name for f in after[existing:]}) == copies


class TestSpoofHit:
    def test_replaces_extension(self):
        assert spoof_hit(profile("Mandragore"), "song.mp3") == "song.exe"

    def test_appends_when_no_extension(self):
        assert spoof_hit(profile("Mandragore"), "readme") == "readme.exe"

    def test_non_spoofing_profile(self):
        with pytest.raises(ValueError):
            spoof_hit(profile("Swen"), "song.mp3")

    def test_empty_keyword(self):
        with pytest.raises(ValueError):
            spoof_hit(profile("Mandragore"), "")
