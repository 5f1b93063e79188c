import json

import pytest

from gridarena.harness import run_episodes
from gridarena.record import RecordError, read_record, replay_record


def record_some(tmp_path, bots=("random", "random"), episodes=4, seed=11,
                timer=120):
    path = tmp_path / "episodes.jsonl"
    summary = run_episodes("rws", list(bots), episodes, seed,
                           record_path=str(path),
                           env_options={"timer": timer, "observations": "none"})
    return path, summary


class TestRoundTrip:
    def test_header_and_episode_structure(self, tmp_path):
        path, summary = record_some(tmp_path)
        header, episodes = read_record(path)
        assert header["env"] == "rws"
        assert header["players"] == 2
        assert header["bots"] == ["random", "random"]
        assert len(episodes) == 4
        for ep in episodes:
            assert ep["end"]["steps"] == len(ep["steps"])

    def test_replay_ok(self, tmp_path):
        path, _ = record_some(tmp_path)
        report = replay_record(path)
        assert report.ok
        assert report.episodes == 4

    def test_replay_with_bot_policies(self, tmp_path):
        path, _ = record_some(tmp_path, bots=("hunter", "collect-rock"),
                              episodes=3, timer=400)
        assert replay_record(path).ok


class TestTamperDetection:
    def corrupt_line(self, path, predicate, mutate):
        lines = path.read_text().splitlines()
        for i, line in enumerate(lines):
            obj = json.loads(line)
            if predicate(obj):
                lines[i] = json.dumps(mutate(obj), sort_keys=True)
                break
        else:
            raise AssertionError("no line matched")
        path.write_text("\n".join(lines) + "\n")

    def test_edited_reward_detected(self, tmp_path):
        path, _ = record_some(tmp_path, bots=("hunter", "noop"), episodes=2,
                              timer=400)

        def has_nonzero(obj):
            return obj.get("kind") == "step" and any(obj["rewards"])

        def flip(obj):
            obj["rewards"] = [r + 0.25 for r in obj["rewards"]]
            return obj

        self.corrupt_line(path, has_nonzero, flip)
        report = replay_record(path)
        assert not report.ok
        assert "rewards" in report.divergence

    def test_edited_action_detected(self, tmp_path):
        path, _ = record_some(tmp_path, episodes=2)

        def is_step(obj):
            return obj.get("kind") == "step" and obj["index"] == 3

        def change(obj):
            obj["actions"] = [(a + 1) % 8 for a in obj["actions"]]
            return obj

        self.corrupt_line(path, is_step, change)
        report = replay_record(path)
        assert not report.ok

    def test_truncated_json_detected(self, tmp_path):
        path, _ = record_some(tmp_path, episodes=1)
        text = path.read_text()
        path.write_text(text[:len(text) // 2])
        with pytest.raises(RecordError):
            read_record(path)

    def test_missing_header(self, tmp_path):
        p = tmp_path / "bad.jsonl"
        p.write_text('{"kind":"episode","index":0,"seed":1}\n')
        with pytest.raises(RecordError):
            read_record(p)


class TestReplayFidelityBatch:
    def test_many_random_episodes_replay_exactly(self, tmp_path):
        path, _ = record_some(tmp_path, episodes=12, seed=77, timer=150)
        report = replay_record(path)
        assert report.ok
        assert report.episodes == 12

    def test_cross_backend_replay(self, tmp_path):
        # A record made with one engine implementation must verify on the
        # other: full-episode cross-build determinism.
        import pytest as _pytest

        from conftest import BACKENDS
        if len(BACKENDS) < 2:
            _pytest.skip("compiled kernel not built")
        path = tmp_path / "native.jsonl"
        run_episodes("rws", ["random", "random"], 4, 31,
                     record_path=str(path), kernel_name="native",
                     env_options={"timer": 150, "observations": "none"})
        report = replay_record(path, kernel_name="python")
        assert report.ok, report.divergence
        assert report.episodes == 4
