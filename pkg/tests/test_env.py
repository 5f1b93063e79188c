import hashlib

import numpy as np
import pytest

from gridarena import ConfigError, NotFoundError, StateError
from gridarena.definition import ObsSpec
from gridarena.env import make_env
from gridarena.rws import FIRE_BEAM, NOOP


def rws_env(seed=42, **opts):
    return make_env("rws", 2, seed, **opts)


class TestMakeEnv:
    def test_two_players_ok(self):
        env = rws_env()
        assert env.num_players == 2
        assert env.action_spec()[0] == "noop"

    def test_wrong_player_count(self):
        with pytest.raises(ConfigError):
            make_env("rws", 1, 0)

    def test_unknown_env(self):
        with pytest.raises(ConfigError):
            make_env("nope", 2, 0)

    def test_two_envs_same_seed_identical_first_obs(self):
        a, b = rws_env(7), rws_env(7)
        oa, ob = a.reset(), b.reset()
        for p in range(2):
            assert (oa[p]["RGB"] == ob[p]["RGB"]).all()
            assert (oa[p]["INVENTORY"] == ob[p]["INVENTORY"]).all()

    def test_step_before_reset(self):
        with pytest.raises(StateError):
            rws_env().step([0, 0])


class TestSpecConformance:
    def test_rgb_window_is_80x80x3(self):
        env = rws_env()
        obs = env.reset()
        for p in range(2):
            assert obs[p]["RGB"].shape == (80, 80, 3)
            assert obs[p]["RGB"].dtype == np.uint8

    def test_observations_match_spec_every_step(self):
        env = rws_env()
        env.reset()
        spec = env.observation_spec()
        for _ in range(5):
            r = env.step([1, 1])
            for p in range(2):
                assert set(r.observations[p]) == set(spec[p])
                for name, os_ in spec[p].items():
                    arr = r.observations[p][name]
                    assert arr.shape == os_.shape
                    assert str(arr.dtype) == os_.dtype

    def test_observation_spec_values(self):
        env = rws_env()
        spec = env.observation_spec(0)
        assert spec["RGB"] == ObsSpec((80, 80, 3), "uint8")
        assert spec["INVENTORY"] == ObsSpec((3,), "int32")

    def test_none_mode_declares_nothing(self):
        env = rws_env(observations="none")
        assert env.observation_spec(0) == {}
        obs = env.reset()
        assert obs == [{}, {}]


class TestDeterminism:
    def drive(self, seed, steps=120):
        env = rws_env(seed)
        env.reset()
        rewards, names = [], []
        rng = np.random.RandomState(99)  # action source independent of env
        h = hashlib.sha256()
        for i in range(steps):
            r = env.step([int(a) for a in rng.randint(0, 8, size=2)])
            rewards.extend(r.rewards)
            names.extend(e.name for e in r.events)
            h.update(r.observations[0]["RGB"].tobytes())
            if r.terminated:
                break
        return rewards, names, env.world.state_hash(), h.hexdigest()

    def test_same_seed_same_everything(self):
        assert self.drive(3) == self.drive(3)

    def test_different_seed_differs(self):
        assert self.drive(3)[2] != self.drive(4)[2]

    def test_seed_mode_fixed_repeats_episodes(self):
        env = rws_env(5, seed_mode="fixed")
        env.reset()
        env.step([1, 1])
        h1 = env.world.state_hash()
        env.reset()
        env.step([1, 1])
        assert env.world.state_hash() == h1

    def test_seed_mode_advance_differs(self):
        env = rws_env(5)
        env.reset()
        env.step([1, 1])
        h1 = env.world.state_hash()
        env.reset()
        env.step([1, 1])
        assert env.world.state_hash() != h1


class TestStepContract:
    def test_noop_step_runs_and_pays_zero(self):
        env = rws_env()
        env.reset()
        r = env.step([NOOP, NOOP])
        assert r.rewards == [0.0, 0.0]
        assert not r.terminated
        assert r.status == "running"

    def test_zero_sum_every_step(self):
        env = rws_env()
        env.reset()
        rng = np.random.RandomState(1)
        for _ in range(300):
            r = env.step([int(a) for a in rng.randint(0, 8, size=2)])
            assert r.rewards[0] + r.rewards[1] == 0.0
            if r.terminated:
                env.reset()

    def test_out_of_range_action(self):
        env = rws_env()
        env.reset()
        with pytest.raises(ConfigError):
            env.step([0, 8])
        with pytest.raises(ConfigError):
            env.step([-1, 0])

    def test_wrong_action_count(self):
        env = rws_env()
        env.reset()
        with pytest.raises(ConfigError):
            env.step([0])

    def test_timer_termination_reported(self):
        env = rws_env(timer=5)
        env.reset()
        for _ in range(4):
            assert not env.step([NOOP, NOOP]).terminated
        r = env.step([NOOP, NOOP])
        assert r.terminated and r.reason == "timer"
        assert r.status == "terminated(timer)"

    def test_events_delivered_on_terminal_step(self):
        env = rws_env(map_text="""
legend W wall
legend . floor
legend P spawnA
legend Q spawnB
map
WWWWW
WP.QW
WWWWW
end
""", strict_size=False, spawn_orientations=("east", "west"))
        env.reset()
        r = env.step([FIRE_BEAM, NOOP])
        assert r.terminated and r.reason == "interaction"
        assert [e.name for e in r.events] == ["interaction"]


class TestProperties:
    def test_read_structural(self):
        env = rws_env()
        env.reset()
        assert env.read_property("world/width") == "24"
        assert env.read_property("world/height") == "16"
        assert "upperPhysical" in env.read_property("world/layers")

    def test_structural_writes_rejected(self):
        env = rws_env()
        with pytest.raises(PermissionError):
            env.write_property("world/width", "10")

    def test_unknown_path(self):
        env = rws_env()
        with pytest.raises(NotFoundError):
            env.read_property("world/missing")
        with pytest.raises(NotFoundError):
            env.write_property("nope/nope", "1")

    def test_timer_write_applies_behaviorally(self):
        env = rws_env()
        env.write_property("rws/timer", "500")
        env.reset()
        steps = 0
        while True:
            steps += 1
            if env.step([NOOP, NOOP]).terminated:
                break
        assert steps == 500
        assert env.read_property("rws/timer") == "500"

    def test_bad_timer_value(self):
        env = rws_env()
        with pytest.raises(ConfigError):
            env.write_property("rws/timer", "soon")
        with pytest.raises(ConfigError):
            env.write_property("rws/timer", "0")

    def test_reads_reflect_latest_write(self):
        env = rws_env()
        env.write_property("rws/beam_length", "5")
        assert env.read_property("rws/beam_length") == "5"
