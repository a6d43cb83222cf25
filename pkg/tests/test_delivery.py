import pytest

from spokensearch.corpus import Document
from spokensearch.delivery import (
    ASCII,
    ConfigurationError,
    DeliveryRequest,
    DeliveryService,
    ProfileStore,
    UnsupportedFormatError,
    register_renderer,
    render,
)


class TestRender:
    def test_d1_matches_golden_file(self, fixture_docs, fixture_path):
        golden = (fixture_path / "golden" / "D1.txt").read_bytes()
        assert render(fixture_docs[0], ASCII) == golden

    def test_wrapping_at_72_columns(self, fixture_docs):
        for doc in fixture_docs:
            for line in render(doc, ASCII).decode().splitlines():
                assert len(line) <= 72

    def test_empty_body(self):
        doc = Document.make("X", "Just a title", [])
        assert render(doc, ASCII) == b"Just a title\n\n"

    def test_unregistered_format(self, fixture_docs):
        with pytest.raises(UnsupportedFormatError):
            render(fixture_docs[0], "pdf")

    def test_registered_plugin_dispatch(self, fixture_docs):
        register_renderer("rdf", lambda doc: f"<doc id='{doc.doc_id}'/>".encode())
        try:
            assert render(fixture_docs[0], "rdf") == b"<doc id='D1'/>"
        finally:
            from spokensearch import delivery

            delivery._RENDERERS.pop("rdf")


class TestProfileStore:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "profiles.tsv"
        store = ProfileStore(path)
        store.add_user(
            "u1", "1234", delivery_address={"email": "a@b.c"}, preferred_threshold=2.5
        )
        reloaded = ProfileStore(path)
        profile = reloaded.get("u1")
        assert profile is not None
        assert profile.delivery_address == {"email": "a@b.c"}
        assert profile.preferred_threshold == 2.5

    def test_authenticate_by_pin(self, tmp_path):
        store = ProfileStore(tmp_path / "p.tsv")
        store.add_user("u1", "1234")
        store.add_user("u2", "5678")
        assert store.authenticate("5678").user_id == "u2"
        assert store.authenticate("0000") is None

    def test_raw_pin_never_stored(self, tmp_path):
        path = tmp_path / "profiles.tsv"
        store = ProfileStore(path)
        store.add_user("u1", "13572468")
        assert "13572468" not in path.read_text("utf-8")
        assert "13572468" not in str(store.get("u1"))

    def test_non_digit_pin_rejected(self):
        with pytest.raises(ValueError):
            ProfileStore(None).add_user("u1", "12a4")

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("not a header\n", "utf-8")
        with pytest.raises(ConfigurationError):
            ProfileStore(path)


class TestDeliver:
    @pytest.fixture()
    def profile(self):
        store = ProfileStore(None)
        return store.add_user(
            "u1", "1234", delivery_address={"email": "u1@example.org", "fax": "+44 141"}
        )

    def test_email_writes_outbox_file(self, tmp_path, fixture_docs, profile):
        service = DeliveryService(tmp_path / "outbox")
        rendered = render(fixture_docs[0], ASCII)
        request = DeliveryRequest(doc_ids=("D1",), channel="email")
        receipt = service.deliver(request, rendered, profile)
        assert receipt.status == "delivered"
        assert receipt.byte_count == len(rendered)
        out = tmp_path / "outbox" / "email" / f"{receipt.receipt_id}.email"
        assert out.read_bytes() == rendered

    def test_missing_address_is_configuration_error(self, tmp_path, fixture_docs, profile):
        service = DeliveryService(tmp_path / "outbox")
        request = DeliveryRequest(doc_ids=("D1",), channel="postal")
        with pytest.raises(ConfigurationError):
            service.deliver(request, b"xx", profile)

    def test_redelivery_issues_fresh_receipt(self, tmp_path, fixture_docs, profile):
        service = DeliveryService(tmp_path / "outbox")
        request = DeliveryRequest(doc_ids=("D1",), channel="email")
        first = service.deliver(request, b"payload", profile)
        second = service.deliver(request, b"payload", profile)
        assert first.receipt_id != second.receipt_id
        assert len(service.receipts) == 2

    def test_voice_channel_not_handled_here(self, tmp_path, profile):
        service = DeliveryService(tmp_path / "outbox")
        request = DeliveryRequest(doc_ids=("D1",), channel="voice")
        with pytest.raises(ConfigurationError):
            service.deliver(request, b"x", profile)

    def test_write_failure_marks_receipt_failed(self, tmp_path, profile):
        # A plain file where the outbox root should be makes mkdir fail.
        blocker = tmp_path / "outbox"
        blocker.write_text("in the way", "utf-8")
        service = DeliveryService(blocker)
        request = DeliveryRequest(doc_ids=("D1",), channel="email")
        receipt = service.deliver(request, b"payload", profile)
        assert receipt.status == "failed"
        assert receipt.error
        assert service.receipts == [receipt]

    def test_unknown_channel_rejected(self):
        with pytest.raises(ValueError):
            DeliveryRequest(doc_ids=("D1",), channel="pigeon")
