import pytest

from seercal import params
from seercal.dataset import (
    MappingRule,
    MappingTable,
    RawProjectRecord,
    builtin_mapping,
    load_mapping,
    load_projects,
    parse_dataset,
    save_projects,
    transfer,
    transfer_all,
)
from seercal.errors import (
    DatasetParseError,
    DatasetSchemaError,
    MappingError,
)
from seercal.synth import synthesize_projects

HEADER = "id,size_kloc,actual_effort,effort_unit,source_model,ACAP,AEXP,TOOL,MODE"


def write_csv(tmp_path, rows, header=HEADER, name="data.csv"):
    path = tmp_path / name
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path


def test_parse_well_formed_rows(tmp_path):
    path = write_csv(
        tmp_path,
        [
            "P1,10,120,person_months,COCOMO81,N,H,L,ORGANIC",
            "P2,25.5,60,person_months,COCOMO81,VL,N,N,EMBEDDED",
            "P3,5,2.5,person_years,COCOMO81,XH,VH,H,SEMIDETACHED",
        ],
    )
    records = parse_dataset(path)
    assert len(records) == 3
    assert records[0].id == "P1"
    assert records[0].size_kloc == 10.0
    assert records[0].ratings["ACAP"] == "N"


def test_parse_normalizes_person_months(tmp_path):
    path = write_csv(tmp_path, ["P1,10,120,person_months,COCOMO81,N,N,N,ORGANIC"])
    rec = parse_dataset(path)[0]
    assert rec.actual_effort == pytest.approx(10.0)
    assert rec.effort_unit == "person_months"
    path2 = write_csv(tmp_path, ["P1,10,10,person_years,COCOMO81,N,N,N,ORGANIC"],
                      name="d2.csv")
    assert parse_dataset(path2)[0].actual_effort == pytest.approx(10.0)


def test_parse_defaults_to_person_months(tmp_path):
    path = write_csv(
        tmp_path, ["P1,10,24,,COCOMO81,N,N,N,ORGANIC"],
    )
    assert parse_dataset(path)[0].actual_effort == pytest.approx(2.0)


def test_parse_rejects_bad_label_naming_row_and_label(tmp_path):
    path = write_csv(
        tmp_path,
        [
            "P1,10,120,person_months,COCOMO81,N,N,N,ORGANIC",
            "P2,10,120,person_months,COCOMO81,MEDIUM,N,N,ORGANIC",
        ],
    )
    with pytest.raises(DatasetParseError, match="row 3.*MEDIUM"):
        parse_dataset(path)


def test_parse_rejects_unknown_driver_column(tmp_path):
    path = write_csv(
        tmp_path, ["P1,10,120,person_months,COCOMO81,N"],
        header="id,size_kloc,actual_effort,effort_unit,source_model,WOBBLE",
    )
    with pytest.raises(DatasetSchemaError, match="WOBBLE"):
        parse_dataset(path)


def test_parse_rejects_driver_foreign_to_model(tmp_path):
    # VIRT exists only in COCOMO81; a COCOMO87 row may not rate it
    path = write_csv(
        tmp_path, ["P1,10,120,person_months,COCOMO87,N"],
        header="id,size_kloc,actual_effort,effort_unit,source_model,VIRT",
    )
    with pytest.raises(DatasetParseError, match="VIRT"):
        parse_dataset(path)


def test_parse_rejects_nonpositive_numbers(tmp_path):
    path = write_csv(tmp_path, ["P1,0,120,person_months,COCOMO81,N,N,N,ORGANIC"])
    with pytest.raises(DatasetParseError, match="row 2"):
        parse_dataset(path)


def test_parse_missing_required_column(tmp_path):
    path = write_csv(tmp_path, ["P1,10"], header="id,size_kloc")
    with pytest.raises(DatasetSchemaError, match="actual_effort"):
        parse_dataset(path)


# --- mappings ----------------------------------------------------------------


def test_builtin_mappings_load_and_validate():
    for model in ("COCOMO81", "COCOMO87"):
        m = builtin_mapping(model)
        assert m.source_model == model
        assert m.default_coordinate == 8.0
        targets = [r.target for r in m.rules]
        assert len(targets) == len(set(targets))
    m87 = builtin_mapping("COCOMO87")
    by_source = {(r.source, r.target) for r in m87.rules}
    assert ("VMVH", "DSVL") in by_source
    assert ("VMVT", "TSVL") in by_source
    assert ("RUSE", "REUS") in by_source


def test_mapping_rejects_duplicate_target():
    rule = MappingRule("ACAP", "ACAP", {"N": 8.0})
    dup = MappingRule("PCAP", "ACAP", {"N": 8.0})
    with pytest.raises(MappingError, match="two rules"):
        MappingTable("COCOMO81", (rule, dup))


def test_mapping_rejects_unknown_target_or_source():
    with pytest.raises(MappingError):
        MappingTable("COCOMO81", (MappingRule("ACAP", "SIBR", {"N": 8.0}),))
    with pytest.raises(MappingError):
        MappingTable("COCOMO81", (MappingRule("RUSE", "REUS", {"N": 8.0}),))


def test_load_mapping_bad_coordinate(tmp_path):
    path = tmp_path / "m.yaml"
    path.write_text(
        "source_model: COCOMO81\nrules:\n"
        "  - {source: ACAP, target: ACAP, ratings: {N: 25}}\n"
    )
    with pytest.raises(MappingError):
        load_mapping(path)


# --- transfer ----------------------------------------------------------------


def make_record(model="COCOMO81", **ratings):
    return RawProjectRecord(
        id="R1", size_kloc=10.0, actual_effort=5.0, effort_unit="person_years",
        ratings=ratings, source_model=model,
    )


def full_81_record(label="N", mode="SEMIDETACHED"):
    mapping = builtin_mapping("COCOMO81")
    ratings = {rule.source: label for rule in mapping.rules if rule.source != "MODE"}
    ratings["MODE"] = mode
    return make_record(**ratings)


def test_transfer_nominal_fixed_point():
    record = full_81_record(label="N", mode="SEMIDETACHED")
    project = transfer(record, builtin_mapping("COCOMO81"))
    assert set(project.ratings) == set(params.RATED_SYMBOLS)
    assert all(v == 8.0 for v in project.ratings.values())
    assert project.size == pytest.approx(10_000.0)
    assert project.sibr == 0.0


def test_transfer_cocomo87_volatility_drivers():
    mapping = builtin_mapping("COCOMO87")
    ratings = {rule.source: "N" for rule in mapping.rules if rule.source != "MODE"}
    ratings["MODE"] = "SEMIDETACHED"
    ratings["VMVH"] = "H"
    ratings["VMVT"] = "VH"
    record = make_record(model="COCOMO87", **ratings)
    project = transfer(record, mapping)
    assert project.ratings["DSVL"] == 11.0  # Hi
    assert project.ratings["TSVL"] == 14.0  # VHi


def test_transfer_unmapped_parameters_default_to_nominal():
    record = full_81_record()
    project = transfer(record, builtin_mapping("COCOMO81"))
    # LANG has no source driver in the default mapping
    assert project.ratings["LANG"] == 8.0


def test_transfer_missing_driver_is_a_mapping_error():
    record = make_record(ACAP="N")  # most drivers absent
    with pytest.raises(MappingError, match="absent"):
        transfer(record, builtin_mapping("COCOMO81"))


def test_transfer_wrong_source_model():
    record = full_81_record()
    with pytest.raises(MappingError, match="COCOMO87"):
        transfer(record, builtin_mapping("COCOMO87"))


def test_transfer_is_deterministic_and_idempotent():
    record = full_81_record(label="H", mode="EMBEDDED")
    mapping = builtin_mapping("COCOMO81")
    a = transfer(record, mapping)
    b = transfer(record, mapping)
    assert dict(a.ratings) == dict(b.ratings)
    assert a.size == b.size and a.actual_effort == b.actual_effort


def test_transfer_all_selects_mapping_per_model():
    rec81 = full_81_record()
    m87 = builtin_mapping("COCOMO87")
    ratings87 = {rule.source: "N" for rule in m87.rules if rule.source != "MODE"}
    ratings87["MODE"] = "ORGANIC"
    rec87 = RawProjectRecord(
        id="R2", size_kloc=4.0, actual_effort=2.0, effort_unit="person_years",
        ratings=ratings87, source_model="COCOMO87",
    )
    projects = transfer_all([rec81, rec87])
    assert len(projects) == 2
    assert projects[1].ratings["D"] == 5.0  # ORGANIC -> Low


# --- canonical project files --------------------------------------------------


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_save_load_projects_round_trip(tmp_path, default_table, suffix):
    projects = synthesize_projects(default_table, 6, seed=40)
    path = tmp_path / f"projects{suffix}"
    save_projects(projects, path)
    loaded = load_projects(path)
    assert len(loaded) == len(projects)
    for a, b in zip(projects, loaded):
        assert a.id == b.id
        assert a.size == pytest.approx(b.size, rel=1e-15)
        assert a.actual_effort == pytest.approx(b.actual_effort, rel=1e-15)
        assert a.sibr == pytest.approx(b.sibr, rel=1e-15)
        for sym in params.RATED_SYMBOLS:
            assert a.ratings[sym] == pytest.approx(b.ratings[sym], rel=1e-15)
