"""Operation-level tests for the simulation core."""

from __future__ import annotations

import math

import pytest

from helpers import basic_tower, inject_enemy, lane_config, walker
from oracles import brute_force_layout_score, scalar_duel, traversal_leak_time, upgrade_cost_table

from towerlab.config import builtin_preset
from towerlab.config.model import LayoutRef, PreplacedTower
from towerlab.sim import (
    Archetype,
    Command,
    CommandKind,
    CommandRejected,
    EventKind,
    GameMode,
    Outcome,
    Phase,
    ScoreMode,
    ScoreWeights,
    TICK_DT,
    Track,
    apply_command,
    compute_score,
    effective_stats,
    evaluate_layout,
    evaluate_selection,
    init_game,
    select_target,
    spawn_preview,
    state_digest,
    tick,
)
from towerlab.sim.engine import StateError, advance_planning


def run_attack(state, max_ticks=10_000):
    events = []
    n = 0
    while state.phase is Phase.ATTACK:
        state, evs = tick(state)
        events.extend(evs)
        n += 1
        assert n <= max_ticks, "round did not resolve"
    return state, events


# ---------------------------------------------------------------------------
# init_game
# ---------------------------------------------------------------------------


class TestInitGame:
    def test_case_study_level1_round0(self):
        config = builtin_preset("case-study")
        state = init_game(config, 0, 0)
        assert 300 <= state.planning_remaining <= 360
        assert config.interact_during_attack is False
        assert state.phase is Phase.PLANNING

    def test_fresh_state_is_empty(self):
        config = builtin_preset("case-study")
        state = init_game(config, 1, 2)
        assert state.towers == []
        assert state.enemies == []
        assert state.tick == 0

    def test_config_echo(self):
        config = lane_config([basic_tower()], starting_gold=20_000, starting_health=100)
        state = init_game(config, 0, 0)
        assert state.total_money == 20_000
        assert state.health == 100

    def test_index_out_of_range(self):
        config = builtin_preset("tutorial")
        with pytest.raises(IndexError):
            init_game(config, 5, 0)
        with pytest.raises(IndexError):
            init_game(config, 0, 99)

    def test_zero_planning_starts_attack(self):
        config = lane_config([basic_tower()], planning_seconds=0.0)
        state = init_game(config, 0, 0)
        assert state.phase is Phase.ATTACK


# ---------------------------------------------------------------------------
# apply_command
# ---------------------------------------------------------------------------


class TestApplyCommand:
    def test_place_discount_reduces_money(self):
        # Mirrors the logged interaction shape: BUY DISCOUNT at (10, 0).
        discount = basic_tower("discount", Archetype.DISCOUNT, cost=180, damage=0.0)
        config = lane_config(
            [discount], lane_y=4, length=12, slots={"ManedWlf": ["discount"]},
            planning_seconds=60,
        )
        state = init_game(config, 0, 0)
        before = state.total_money
        state, events = apply_command(
            state, Command("ManedWlf", CommandKind.PLACE, spec_id="discount", cell=(10, 0))
        )
        assert events[0].kind is EventKind.PLACED
        assert state.tower_at((10, 0)) is not None
        assert state.total_money == before - 180

    def test_place_on_path_rejected(self):
        config = lane_config([basic_tower()], planning_seconds=60)
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(3, 0)))
        assert err.value.code == "cell_not_buildable"

    def test_discounted_upgrade_cost_table(self):
        # Expected costs hand-computed by the spreadsheet oracle: base 100,
        # doubling per level, single 0.8 discount -> [80, 160, 320].
        expected = upgrade_cost_table(base_cost=100, discount=0.8, levels=3)
        assert expected == [80, 160, 320]

        turret = basic_tower("turret", upgrade_cost=100)
        discount = basic_tower("discount", Archetype.DISCOUNT, cost=180, damage=0.0, range_=2.5)
        config = lane_config([turret, discount], planning_seconds=60, starting_gold=5000)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="discount", cell=(5, 2)))
        paid = []
        for _ in range(3):
            state, events = apply_command(
                state, Command("p1", CommandKind.UPGRADE, cell=(4, 2), track=Track.DAMAGE)
            )
            paid.append(events[0].details["cost"])
        assert paid == expected

    def test_undiscounted_upgrade_cost_table(self):
        expected = upgrade_cost_table(base_cost=100, discount=1.0, levels=3)
        assert expected == [100, 200, 400]
        config = lane_config([basic_tower("turret", upgrade_cost=100)], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        paid = []
        for _ in range(3):
            state, events = apply_command(
                state, Command("p1", CommandKind.UPGRADE, cell=(4, 2), track=Track.DAMAGE)
            )
            paid.append(events[0].details["cost"])
        assert paid == expected

    def test_upgrade_beyond_max_rejected(self):
        config = lane_config([basic_tower("turret")], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        for _ in range(3):
            state, _ = apply_command(state, Command("p1", CommandKind.UPGRADE, cell=(4, 2), track=Track.RANGE))
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.UPGRADE, cell=(4, 2), track=Track.RANGE))
        assert err.value.code == "max_upgrade_level"

    def test_insufficient_funds(self):
        config = lane_config([basic_tower(cost=500)], starting_gold=499, planning_seconds=60)
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        assert err.value.code == "insufficient_funds"

    def test_unknown_and_unassigned_specs(self):
        sniper = basic_tower("sniper", Archetype.SNIPER)
        config = lane_config(
            [basic_tower("turret"), sniper],
            slots={"p1": ["turret"], "p2": ["sniper"]},
            planning_seconds=60,
        )
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="nope", cell=(4, 2)))
        assert err.value.code == "unknown_tower"
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="sniper", cell=(4, 2)))
        assert err.value.code == "tower_not_assigned"

    def test_occupied_cell(self):
        config = lane_config([basic_tower()], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        assert err.value.code == "cell_occupied"

    def test_sell_refund_full_during_planning(self):
        config = lane_config([basic_tower(cost=100, upgrade_cost=100)], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        state, _ = apply_command(state, Command("p1", CommandKind.UPGRADE, cell=(4, 2), track=Track.DAMAGE))
        before = state.total_money
        state, events = apply_command(state, Command("p1", CommandKind.SELL, cell=(4, 2)))
        assert events[0].details["refund"] == 200  # 1.0 x (100 + 100)
        assert state.total_money == before + 200
        assert state.tower_at((4, 2)) is None

    def test_sell_refund_reduced_during_attack(self):
        config = lane_config(
            [basic_tower(cost=100)], planning_seconds=0.0, interact_during_attack=True,
            spawn_entries=[("walker", 5.0)],
        )
        state = init_game(config, 0, 0)
        assert state.phase is Phase.ATTACK
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        state, events = apply_command(state, Command("p1", CommandKind.SELL, cell=(4, 2)))
        assert events[0].details["refund"] == 75  # 0.75 x 100

    def test_phase_violation_leaves_state_unchanged(self):
        config = lane_config(
            [basic_tower()], planning_seconds=0.0, interact_during_attack=False,
            spawn_entries=[("walker", 5.0)],
        )
        state = init_game(config, 0, 0)
        digest_before = state_digest(state)
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(4, 2)))
        assert err.value.code == "phase_violation"
        assert state_digest(state) == digest_before

    def test_ready_unanimity_starts_attack(self):
        config = lane_config(
            [basic_tower()], slots={"p1": ["turret"], "p2": ["turret"]}, planning_seconds=300,
        )
        state = init_game(config, 0, 0)
        state, events = apply_command(state, Command("p1", CommandKind.READY))
        assert state.phase is Phase.PLANNING and not events
        state, events = apply_command(state, Command("p2", CommandKind.READY))
        assert state.phase is Phase.ATTACK
        assert events[0].kind is EventKind.PHASE_CHANGED

    def test_ready_unlatch(self):
        config = lane_config(
            [basic_tower()], slots={"p1": ["turret"], "p2": ["turret"]}, planning_seconds=300,
        )
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.READY))
        state, _ = apply_command(state, Command("p1", CommandKind.READY))  # unlatch
        state, _ = apply_command(state, Command("p2", CommandKind.READY))
        assert state.phase is Phase.PLANNING


# ---------------------------------------------------------------------------
# tick
# ---------------------------------------------------------------------------


class TestTick:
    def test_vacuous_win_without_spawns(self):
        config = lane_config([basic_tower()], planning_seconds=0.0)
        state = init_game(config, 0, 0)
        state, events = tick(state)
        assert state.outcome is Outcome.WIN
        kinds = [e.kind for e in events]
        assert EventKind.PHASE_CHANGED in kinds and EventKind.ROUND_ENDED in kinds

    def test_kill_or_leak_matches_scalar_oracle(self):
        # One enemy (100 hp, 1 tile/s) on a 10-tile lane; one turret at (5, 1)
        # whose range sqrt(5) covers lane tiles 3..7.
        range_ = math.sqrt(5.0)
        oracle = scalar_duel(
            health=100.0, speed=1.0, route_length=10.0,
            tower_x=5.0, tower_y=1.0, damage=10.0, firerate=1.0, range_=range_,
        )
        assert oracle.result == "leak"  # 6 shots of 10 in the window leave 40 hp

        config = lane_config(
            [basic_tower(range_=range_, damage=10.0, firerate=1.0)],
            spawn_entries=[("walker", 0.0)],
            planning_seconds=30,
        )
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(5, 1)))
        state, _ = apply_command(state, Command("p1", CommandKind.READY))
        attack_start = state.tick
        state, events = run_attack(state)

        leaks = [e for e in events if e.kind is EventKind.LEAKED]
        kills = [e for e in events if e.kind is EventKind.KILLED]
        assert len(leaks) == 1 and not kills
        sim_tick = leaks[0].tick - attack_start
        assert abs(sim_tick - oracle.time / TICK_DT) <= 1.0 + 1e-6

    def test_leak_time_closed_form(self):
        # Route length 10 at 2 tiles/s leaks at 5.0 s and costs one health.
        expected = traversal_leak_time(10.0, 2.0)
        assert expected == 5.0
        config = lane_config(
            [basic_tower()],
            enemies=[walker(speed=2.0)],
            spawn_entries=[("walker", 0.0)],
            planning_seconds=0.0,
        )
        state = init_game(config, 0, 0)
        start_health = state.health
        state, events = run_attack(state)
        leak = next(e for e in events if e.kind is EventKind.LEAKED)
        assert abs(leak.tick * TICK_DT - expected) <= TICK_DT + 1e-9
        assert state.health == start_health - 1

    def test_tick_outside_attack_rejected(self):
        config = lane_config([basic_tower()], planning_seconds=60)
        state = init_game(config, 0, 0)
        with pytest.raises(StateError):
            tick(state)


# ---------------------------------------------------------------------------
# select_target / effective_stats
# ---------------------------------------------------------------------------


class TestTargeting:
    def _state_with_tower(self, **tower_kwargs):
        config = lane_config([basic_tower(**tower_kwargs)], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(5, 1)))
        return state, state.towers[0]

    def test_furthest_progress_first(self):
        state, tower = self._state_with_tower(range_=5.0)
        inject_enemy(state, "walker", progress=4.0)
        expected = inject_enemy(state, "walker", progress=6.0)
        assert select_target(state, tower) is expected

    def test_tie_breaks_by_spawn_index(self):
        state, tower = self._state_with_tower(range_=5.0)
        state.next_spawn_index = 3
        first = inject_enemy(state, "walker", progress=5.0)
        state.next_spawn_index = 7
        inject_enemy(state, "walker", progress=5.0)
        assert select_target(state, tower) is first

    def test_closed_range_boundary(self):
        # Tower at (5, 1), enemy at lane x=5: distance exactly 1.0.
        state, tower = self._state_with_tower(range_=1.0)
        boundary = inject_enemy(state, "walker", progress=5.0)
        assert select_target(state, tower) is boundary
        # Nudge one interpolation step beyond the boundary: out of range.
        boundary.progress = 5.5
        assert select_target(state, tower) is None

    def test_aura_towers_do_not_target(self):
        support = basic_tower("banner", Archetype.SUPPORT, damage=0.0)
        config = lane_config([support], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="banner", cell=(5, 1)))
        with pytest.raises(StateError):
            select_target(state, state.towers[0])


class TestEffectiveStats:
    def test_identity_without_upgrades(self):
        config = lane_config([basic_tower(range_=3.0, damage=10.0, firerate=1.0)], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(5, 1)))
        assert effective_stats(state, state.towers[0]) == (3.0, 10.0, 1.0)

    def test_damage_multiplier_table(self):
        config = lane_config([basic_tower(damage=10.0)], planning_seconds=60, starting_gold=10_000)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(5, 1)))
        for _ in range(2):
            state, _ = apply_command(state, Command("p1", CommandKind.UPGRADE, cell=(5, 1), track=Track.DAMAGE))
        _, damage, _ = effective_stats(state, state.towers[0])
        assert damage == pytest.approx(10.0 * 1.5**2)

    def test_support_buff_does_not_stack(self):
        support = basic_tower("banner", Archetype.SUPPORT, damage=0.0, range_=3.0)
        config = lane_config([basic_tower(), support], planning_seconds=60)
        state = init_game(config, 0, 0)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="turret", cell=(5, 2)))
        turret = state.towers[0]
        base = effective_stats(state, turret)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="banner", cell=(4, 2)))
        one = effective_stats(state, turret)
        state, _ = apply_command(state, Command("p1", CommandKind.PLACE, spec_id="banner", cell=(6, 2)))
        two = effective_stats(state, turret)
        assert one == two
        assert all(buffed == pytest.approx(plain * 1.2) for buffed, plain in zip(one, base))


# ---------------------------------------------------------------------------
# compute_score / spawn_preview
# ---------------------------------------------------------------------------


class TestScore:
    def _ended_state(self, outcome=Outcome.WIN):
        config = lane_config([basic_tower()])
        state = init_game(config, 0, 0)
        state.outcome = outcome
        return state

    def test_binary_win(self):
        state = self._ended_state(Outcome.WIN)
        assert compute_score(state, ScoreWeights(mode=ScoreMode.BINARY)) == 1.0
        state = self._ended_state(Outcome.LOSE)
        assert compute_score(state, ScoreWeights(mode=ScoreMode.BINARY)) == 0.0

    def test_linear_arithmetic(self):
        state = self._ended_state()
        state.money = {"team": 14_000}
        state.kill_points = 250
        state.health = 100
        weights = ScoreWeights(mode=ScoreMode.LINEAR, w_unspent=1.0, w_points=1.0, w_health=10.0)
        assert compute_score(state, weights) == 15_250.0

    def test_zero_weights(self):
        state = self._ended_state()
        weights = ScoreWeights(mode=ScoreMode.LINEAR, w_unspent=0.0, w_points=0.0, w_health=0.0)
        assert compute_score(state, weights) == 0.0

    def test_score_while_ongoing_rejected(self):
        config = lane_config([basic_tower()])
        state = init_game(config, 0, 0)
        with pytest.raises(StateError):
            compute_score(state, ScoreWeights())


class TestSpawnPreview:
    def test_projection(self):
        config = lane_config(
            [basic_tower()],
            enemies=[walker("grunt"), walker("runner", speed=2.0)],
            spawn_entries=[("grunt", 0.0), ("runner", 2.0)],
            planning_seconds=60,
        )
        state = init_game(config, 0, 0)
        assert spawn_preview(state, "s1") == ["grunt", "runner"]

    def test_empty_script(self):
        from towerlab.sim.types import SpawnScript

        config = lane_config([basic_tower()], planning_seconds=60)
        config.levels[0].spawn_scripts = [SpawnScript("s1", "lane", [])]
        state = init_game(config, 0, 0)
        assert spawn_preview(state, "s1") == []

    def test_purity(self):
        config = lane_config(
            [basic_tower()], spawn_entries=[("walker", 0.0), ("walker", 1.0)], planning_seconds=60,
        )
        state = init_game(config, 0, 0)
        assert spawn_preview(state, "s1") == spawn_preview(state, "s1")

    def test_unknown_spawn_point(self):
        config = lane_config([basic_tower()], planning_seconds=60)
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected):
            spawn_preview(state, "nope")


# ---------------------------------------------------------------------------
# Object modes
# ---------------------------------------------------------------------------


class TestObjectModes:
    def test_selection_correct_and_incorrect(self):
        config = builtin_preset("object-selection")
        state = init_game(config, 0, 0)
        target = state.tower_at(config.levels[0].selection_target)
        assert evaluate_selection(state, target.tower_id, target.tower_id) is True
        assert state.outcome is Outcome.WIN

        state = init_game(config, 0, 0)
        other = state.tower_at((1, 1))
        assert evaluate_selection(state, other.tower_id, target.tower_id) is False
        assert state.outcome is Outcome.LOSE

    def test_select_command_in_td_mode_is_phase_violation(self):
        config = lane_config([basic_tower()], planning_seconds=60)
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected) as err:
            apply_command(state, Command("p1", CommandKind.SELECT, cell=(3, 3)))
        assert err.value.code == "phase_violation"

    def test_layout_identical_reference_scores_one(self):
        config = builtin_preset("object-manipulation")
        state = init_game(config, 0, 0)
        reference = config.levels[0].reference_layout
        # Move pieces from the staging cells onto the reference cells.
        for pre, ref in zip(config.levels[0].preplaced_towers, reference):
            state, _ = apply_command(state, Command("operator", CommandKind.SELL, cell=pre.cell))
            state, _ = apply_command(
                state, Command("operator", CommandKind.PLACE, spec_id=ref.spec_id, cell=ref.cell)
            )
        assert evaluate_layout(state, reference) == 1.0

    def test_layout_empty_board_scores_zero(self):
        config = builtin_preset("object-manipulation")
        state = init_game(config, 0, 0)
        for pre in list(config.levels[0].preplaced_towers):
            state, _ = apply_command(state, Command("operator", CommandKind.SELL, cell=pre.cell))
        assert evaluate_layout(state, config.levels[0].reference_layout) == 0.0

    def test_layout_partial_match_brute_force(self):
        # 3-item reference, 2 exact placements, 1 wrong-orientation copy.
        config = builtin_preset("object-manipulation")
        reference = [
            LayoutRef("armchair_n", (2, 2), "N"),
            LayoutRef("table_n", (4, 2), "N"),
            LayoutRef("armchair_n", (6, 2), "N"),
        ]
        config.levels[0].reference_layout = reference
        state = init_game(config, 0, 0)
        for pre in list(config.levels[0].preplaced_towers):
            state, _ = apply_command(state, Command("operator", CommandKind.SELL, cell=pre.cell))
        placements = [("armchair_n", (2, 2)), ("table_n", (4, 2)), ("armchair_e", (6, 2))]
        for spec_id, cell in placements:
            state, _ = apply_command(state, Command("operator", CommandKind.PLACE, spec_id=spec_id, cell=cell))

        oracle = brute_force_layout_score(
            placed=[("armchair_n", (2, 2), "N"), ("table_n", (4, 2), "N"), ("armchair_e", (6, 2), "E")],
            reference=[("armchair_n", (2, 2), "N"), ("table_n", (4, 2), "N"), ("armchair_n", (6, 2), "N")],
        )
        assert oracle == pytest.approx(2 / 3)
        assert evaluate_layout(state, reference) == pytest.approx(oracle)

    def test_layout_mode_mismatch(self):
        config = lane_config([basic_tower()])
        state = init_game(config, 0, 0)
        with pytest.raises(CommandRejected):
            evaluate_layout(state, [])


# ---------------------------------------------------------------------------
# Planning timer
# ---------------------------------------------------------------------------


class TestPlanningTimer:
    def test_expiry_transitions_to_attack(self):
        config = lane_config([basic_tower()], planning_seconds=1.0, spawn_entries=[("walker", 0.0)])
        state = init_game(config, 0, 0)
        transitions = []
        while state.phase is Phase.PLANNING:
            state, events = advance_planning(state)
            transitions.extend(events)
        assert state.phase is Phase.ATTACK
        assert abs(state.tick * TICK_DT - 1.0) <= TICK_DT + 1e-9
        assert transitions[0].kind is EventKind.PHASE_CHANGED
