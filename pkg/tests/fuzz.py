"""Random-but-valid command sequence driver shared by property and acceptance tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from towerlab.config.model import SessionConfig
from towerlab.sim import (
    Command,
    CommandKind,
    CommandRejected,
    EventKind,
    GameState,
    Phase,
    Track,
    apply_command,
    init_game,
    tick,
)
from towerlab.sim.engine import advance_planning


@dataclass
class EconomyLedger:
    """Running totals of every gold movement, reconstructed from events."""

    starting_gold: int
    purchases: int = 0  # tower costs + upgrade costs
    refunds: int = 0
    bounties: int = 0
    spawned: int = 0
    killed: int = 0
    leaked: int = 0
    health_drops: list[int] = field(default_factory=list)

    def absorb(self, events) -> None:
        for event in events:
            if event.kind is EventKind.PLACED:
                self.purchases += event.details["cost"]
            elif event.kind is EventKind.UPGRADED:
                self.purchases += event.details["cost"]
            elif event.kind is EventKind.SOLD:
                self.refunds += event.details["refund"]
            elif event.kind is EventKind.KILLED:
                self.bounties += event.details["bounty"]
                self.killed += 1
            elif event.kind is EventKind.SPAWNED:
                self.spawned += 1
            elif event.kind is EventKind.LEAKED:
                self.leaked += 1

    def conservation_holds(self, state: GameState) -> bool:
        return (
            self.starting_gold + self.bounties
            == state.total_money + self.purchases - self.refunds
        )


def random_command(rng: random.Random, state: GameState, config: SessionConfig) -> Command | None:
    slot = rng.choice(config.slot_ids)
    choice = rng.random()
    grid = config.levels[state.level_index].map

    if choice < 0.45:
        assignment = config.team.assignment(slot)
        if not assignment or not assignment.tower_ids:
            return None
        spec_id = rng.choice(assignment.tower_ids)
        free = [c for c in grid.buildable_cells() if state.tower_at(c) is None]
        if not free:
            return None
        return Command(slot, CommandKind.PLACE, spec_id=spec_id, cell=rng.choice(free))
    if choice < 0.7:
        if not state.towers:
            return None
        tower = rng.choice(state.towers)
        return Command(slot, CommandKind.UPGRADE, cell=tower.cell, track=rng.choice(list(Track)))
    if choice < 0.85:
        if not state.towers:
            return None
        tower = rng.choice(state.towers)
        return Command(tower.owner or slot, CommandKind.SELL, cell=tower.cell)
    return Command(slot, CommandKind.READY)


def drive_random_round(
    config: SessionConfig,
    seed: int,
    level_index: int = 0,
    max_ticks: int = 400,
    per_tick_check=None,
):
    """Play one round with random valid commands, checking after every step.

    Rejected commands are skipped (they must leave state untouched, which the
    phase-gating tests cover separately). Returns (state, ledger).
    """
    rng = random.Random(seed)
    state = init_game(config, level_index, 0)
    ledger = EconomyLedger(starting_gold=state.total_money)

    steps = 0
    while state.phase is not Phase.ENDED and steps < max_ticks:
        for _ in range(rng.randrange(0, 3)):
            cmd = random_command(rng, state, config)
            if cmd is None:
                continue
            try:
                state, events = apply_command(state, cmd)
            except CommandRejected:
                continue
            ledger.absorb(events)
        if state.phase is Phase.PLANNING:
            state, events = advance_planning(state)
        elif state.phase is Phase.ATTACK:
            state, events = tick(state)
        else:
            break
        ledger.absorb(events)
        steps += 1
        if per_tick_check is not None:
            per_tick_check(state, ledger)
    return state, ledger
