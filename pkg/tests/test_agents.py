"""Rule primitives, preset policies, and policy files."""

from __future__ import annotations

import pytest

from hanabi_bench.agents import (
    DiscardOldest,
    DiscardRandom,
    HintMostInformation,
    HintPlayable,
    HintRandom,
    HintUseless,
    LegalRandom,
    PlayBestWhenDeckEmpty,
    PlayProbablySafe,
    PlaySafe,
    Policy,
    PolicyAgent,
    PRESET_NAMES,
    decide,
    format_policy,
    parse_policy,
    preset,
    try_rule,
)
from hanabi_bench.engine import (
    Card,
    Discard,
    GameConfig,
    Hint,
    Play,
    new_game,
    observe,
)
from hanabi_bench.errors import ConfigurationError, PolicyError
from hanabi_bench.rng import GameRng

from conftest import play_random_turns


def fresh(seed=0, **kwargs):
    return new_game(GameConfig(num_players=2, seed=seed, **kwargs))


def obs_for(state):
    return observe(state, state.current_player)


# ---------------------------------------------------------------------------
# Play rules
# ---------------------------------------------------------------------------

def test_play_safe_fires_on_hinted_rank_one():
    state = fresh()
    state.hands[0] = [Card(1, 3), Card(2, 4), Card(0, 1), Card(3, 2), Card(4, 5)]
    state.current_player = 1
    state.apply(Hint.of_rank(0, 1))  # touches only slot 2
    move = try_rule(PlaySafe(), obs_for(state), GameRng(0))
    assert move == Play(2)
    # the simplest belief tier reaches the same conclusion here
    assert try_rule(PlaySafe(hints_only=True), obs_for(state), GameRng(0)) == Play(2)


def test_play_safe_silent_when_nothing_is_certain():
    assert try_rule(PlaySafe(), obs_for(fresh()), GameRng(0)) is None


def test_hints_only_tier_ignores_negative_deductions():
    state = fresh()
    state.hands[0] = [Card(0, 1), Card(1, 2), Card(2, 3), Card(3, 4), Card(4, 5)]
    for rank in (2, 3, 4, 5):
        state.current_player = 1
        state.info_tokens = 8
        state.apply(Hint.of_rank(0, rank))
    # slot 0 is untouched by every hint: negatively deduced to be rank 1
    k = state.knowledge[0][0]
    assert k.possible_ranks() == (1,) and not k.rank_hinted
    state.current_player = 0
    obs = obs_for(state)
    assert obs.known_playable(0)
    assert not obs.known_playable(0, hints_only=True)


def test_play_probably_safe_thresholds():
    # a start position where an unhinted card is playable 13/45 ~ 0.289
    for seed in range(300):
        state = new_game(GameConfig(num_players=2, seed=seed))
        if [c.rank for c in state.hands[1]].count(1) == 2:
            break
    obs = obs_for(state)
    assert try_rule(PlayProbablySafe(0.25), obs, GameRng(0)) == Play(0)
    assert try_rule(PlayProbablySafe(0.60), obs, GameRng(0)) is None


def test_play_probably_safe_lives_gate():
    state = fresh()
    state.hands[0][0] = Card(0, 1)
    state.lives = 1
    obs = obs_for(state)
    gated = PlayProbablySafe(0.25, min_lives=2)
    assert try_rule(gated, obs, GameRng(0)) is None
    assert try_rule(PlayProbablySafe(0.25), obs, GameRng(0)) is not None


def test_play_probably_safe_picks_the_best_slot():
    state = fresh()
    state.hands[0] = [Card(1, 3), Card(0, 1), Card(2, 4), Card(3, 3), Card(4, 4)]
    state.current_player = 1
    state.apply(Hint.of_rank(0, 1))  # slot 1 known rank 1: probability 1
    move = try_rule(PlayProbablySafe(0.5), obs_for(state), GameRng(0))
    assert move == Play(1)


def test_threshold_validation():
    with pytest.raises(ConfigurationError):
        PlayProbablySafe(1.5)


def test_play_best_when_deck_empty():
    state = fresh()
    state.hands[0] = [Card(1, 3), Card(0, 1), Card(2, 4), Card(3, 3), Card(4, 4)]
    state.current_player = 1
    state.apply(Hint.of_rank(0, 1))
    obs = obs_for(state)
    assert obs.deck_size > 0
    assert try_rule(PlayBestWhenDeckEmpty(2), obs, GameRng(0)) is None

    state.deck = []
    obs = obs_for(state)
    assert try_rule(PlayBestWhenDeckEmpty(2), obs, GameRng(0)) == Play(1)
    state.lives = 1
    assert try_rule(PlayBestWhenDeckEmpty(2), obs_for(state), GameRng(0)) is None


# ---------------------------------------------------------------------------
# Discard rules
# ---------------------------------------------------------------------------

def test_discard_rules_gated_by_full_pool():
    obs = obs_for(fresh())
    assert obs.info_tokens == 8
    assert try_rule(DiscardOldest(), obs, GameRng(0)) is None
    assert try_rule(DiscardRandom(), obs, GameRng(0)) is None


def test_discard_oldest_takes_slot_zero():
    state = fresh()
    state.info_tokens = 5
    assert try_rule(DiscardOldest(), obs_for(state), GameRng(0)) == Discard(0)


def test_discard_useless_after_rank_exhausted():
    state = fresh()
    state.info_tokens = 5
    state.fireworks = [1, 1, 1, 1, 1]
    state.hands[0] = [Card(1, 3), Card(0, 1), Card(2, 4), Card(3, 3), Card(4, 4)]
    state.current_player = 1
    state.apply(Hint.of_rank(0, 1))  # slot 1 is rank 1: every pile has moved on
    from hanabi_bench.agents import DiscardUseless

    assert try_rule(DiscardUseless(), obs_for(state), GameRng(0)) == Discard(1)
    assert try_rule(DiscardUseless(hints_only=True), obs_for(state), GameRng(0)) == Discard(1)


def test_discard_random_is_uniform_ish():
    state = fresh()
    state.info_tokens = 5
    rng = GameRng(9)
    counts = [0] * 5
    for _ in range(500):
        move = try_rule(DiscardRandom(), obs_for(state), rng)
        counts[move.slot] += 1
    assert all(c > 50 for c in counts)


# ---------------------------------------------------------------------------
# Hint rules
# ---------------------------------------------------------------------------

def test_hint_playable_targets_a_playable_card():
    state = fresh()
    state.hands[1] = [Card(1, 3), Card(0, 1), Card(2, 4), Card(3, 3), Card(4, 4)]
    move = try_rule(HintPlayable(), obs_for(state), GameRng(0))
    assert isinstance(move, Hint)
    assert move.target == 1
    # the hint is about the rank-1 card: either its rank or its color
    assert (move.rank == 1) or (move.color == 0)


def test_hint_playable_tracking_refuses_redundant_hints():
    state = fresh()
    state.hands[1] = [Card(1, 3), Card(0, 1), Card(2, 4), Card(3, 4), Card(4, 4)]
    state.apply(Hint.of_rank(1, 1))
    state.apply(Hint.of_color(0, state.hands[0][0].color))  # partner acts
    state.current_player = 0
    state.apply(Hint.of_color(1, 0))  # slot 1 now fully hinted
    state.current_player = 0
    state.info_tokens = 8
    obs = obs_for(state)
    assert try_rule(HintPlayable(track_partner_knowledge=True), obs, GameRng(0)) is None
    untracked = try_rule(
        HintPlayable(track_partner_knowledge=False), obs, GameRng(0)
    )
    assert isinstance(untracked, Hint)  # happily repeats itself


def test_hint_playable_fallback_hints_something():
    state = fresh()
    state.fireworks = [1, 1, 1, 1, 1]
    state.hands[1] = [Card(0, 1), Card(1, 1), Card(2, 1), Card(3, 1), Card(4, 1)]
    obs = obs_for(state)
    assert try_rule(HintPlayable(), obs, GameRng(0)) is None
    move = try_rule(HintPlayable(fallback_to_any=True), obs, GameRng(0))
    assert isinstance(move, Hint)


def test_hint_playable_needs_tokens():
    state = fresh()
    state.info_tokens = 0
    assert try_rule(HintPlayable(fallback_to_any=True), obs_for(state), GameRng(0)) is None


def test_hint_useless_conditions():
    state = fresh()
    state.fireworks = [1, 0, 0, 0, 0]
    state.hands[1] = [Card(0, 1), Card(1, 2), Card(2, 3), Card(3, 4), Card(4, 5)]
    obs = obs_for(state)
    move = try_rule(HintUseless(), obs, GameRng(0))
    assert isinstance(move, Hint)
    assert move.rank == 1 or move.color == 0  # about the dead R1
    # token-starvation condition: only fire below the threshold
    assert try_rule(HintUseless(max_tokens_condition=4), obs, GameRng(0)) is None
    state.info_tokens = 3
    assert try_rule(HintUseless(max_tokens_condition=4), obs_for(state), GameRng(0)) is not None


def test_hint_most_information_maximizes_touches():
    state = fresh()
    state.hands[1] = [Card(0, 2), Card(1, 2), Card(2, 2), Card(0, 4), Card(0, 5)]
    move = try_rule(HintMostInformation(), obs_for(state), GameRng(0))
    assert move == Hint.of_rank(1, 2)  # 3 cards beat the 3-card color? rank wins ties
    state.hands[1] = [Card(0, 2), Card(0, 3), Card(2, 2), Card(0, 4), Card(0, 5)]
    move = try_rule(HintMostInformation(), obs_for(state), GameRng(0))
    assert move == Hint.of_color(1, 0)  # 4 touches beat 2


def test_hint_random_is_legal_and_varied():
    state = fresh()
    rng = GameRng(3)
    seen = set()
    legal_hints = {m for m in obs_for(state).legal_moves if isinstance(m, Hint)}
    for _ in range(200):
        move = try_rule(HintRandom(), obs_for(state), rng)
        assert move in legal_hints
        seen.add(move)
    assert len(seen) == len(legal_hints)


def test_legal_random_always_fires():
    state = fresh()
    rng = GameRng(4)
    legal = set(obs_for(state).legal_moves)
    for _ in range(100):
        assert try_rule(LegalRandom(), obs_for(state), rng) in legal


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

def test_presets_exist_and_unknown_name_rejected():
    for name in PRESET_NAMES:
        policy = preset(name)
        assert policy.name == name
        assert policy.rules
    with pytest.raises(ConfigurationError):
        preset("smartbot")


def test_preset_threshold_values():
    vdb_rules = preset("vdb").rules
    assert any(
        isinstance(r, PlayProbablySafe) and r.threshold == 0.60 for r in vdb_rules
    )
    flawed_rules = preset("flawed").rules
    assert any(
        isinstance(r, PlayProbablySafe) and r.threshold == 0.25 for r in flawed_rules
    )
    assert any(isinstance(r, HintRandom) for r in flawed_rules)
    piers_rules = preset("piers").rules
    assert any(
        isinstance(r, PlayBestWhenDeckEmpty) and r.min_lives == 2 for r in piers_rules
    )
    assert any(
        isinstance(r, HintUseless) and r.max_tokens_condition == 4 for r in piers_rules
    )
    assert preset("legal_random").rules == (LegalRandom(),)


def test_decide_first_firing_rule_wins():
    state = fresh()
    state.hands[0][0] = Card(0, 1)
    state.current_player = 1
    state.apply(Hint.of_color(0, 0))
    state.current_player = 1
    state.apply(Hint.of_rank(0, 1))
    state.current_player = 0
    move = decide(preset("iggi"), obs_for(state), GameRng(0))
    assert move == Play(0)  # PlaySafe outranks every hint rule


def test_internal_opening_hints_the_playable_one():
    for seed in range(100):
        state = new_game(GameConfig(num_players=2, seed=seed))
        ones = [i for i, c in enumerate(state.hands[1]) if c.rank == 1]
        if not ones:
            continue
        move = decide(preset("internal"), obs_for(state), GameRng(seed))
        assert isinstance(move, Hint)
        touched = [
            i
            for i, c in enumerate(state.hands[1])
            if (c.color == move.color if move.color is not None else c.rank == move.rank)
        ]
        assert any(state.hands[1][i].rank == 1 for i in touched)
        return
    pytest.fail("no deal with a playable one found")


def test_legal_random_policy_plays_uniformly():
    state = fresh()
    rng = GameRng(12)
    legal = set(obs_for(state).legal_moves)
    picks = {decide(preset("legal_random"), obs_for(state), rng) for _ in range(300)}
    assert picks == legal


def test_decide_is_deterministic_given_rng_state():
    state = play_random_turns(fresh(8), GameRng(8), 10)
    obs = obs_for(state)
    for name in PRESET_NAMES:
        assert decide(preset(name), obs, GameRng(77)) == decide(
            preset(name), obs, GameRng(77)
        )


def test_every_preset_total_on_random_states():
    rng = GameRng(123)
    policies = [preset(name) for name in PRESET_NAMES]
    checked = 0
    seed = 0
    while checked < 700:
        state = play_random_turns(fresh(seed), GameRng(seed), rng.randbelow(40))
        seed += 1
        assert seed < 2000
        if state.terminal:
            continue
        obs = obs_for(state)
        legal = set(obs.legal_moves)
        for policy in policies:
            assert decide(policy, obs, rng) in legal
            checked += 1


def test_policy_must_produce_a_move():
    # a deliberately partial policy: nothing fires on a fresh deal
    partial = Policy("broken", (PlaySafe(),))
    with pytest.raises(PolicyError):
        decide(partial, obs_for(fresh()), GameRng(0))


def test_degenerate_agents_score_zero_almost_always():
    from hanabi_bench.harness import MatchConfig, run_pairing

    for name in ("flawed", "legal_random"):
        sink: list[int] = []
        run_pairing(
            MatchConfig(name, name, n_games=300, master_seed=2468),
            score_sink=sink,
        )
        zeros = sum(1 for s in sink if s == 0)
        assert zeros >= 0.99 * len(sink), f"{name} scored too often"


def test_outer_hints_always_teach_something():
    # every hint outer gives must shrink a touched slot's knowledge
    agent = PolicyAgent(preset("outer"))
    for seed in range(30):
        rng = GameRng(seed)
        state = new_game(GameConfig(num_players=2, seed=rng.next_u64()))
        while not state.terminal:
            obs = observe(state, state.current_player)
            move = agent.decide(obs, rng)
            if isinstance(move, Hint):
                ks = state.knowledge[move.target]
                if move.color is not None:
                    teaches = any(
                        c.color == move.color and k.color_mask != 1 << move.color
                        for c, k in zip(state.hands[move.target], ks)
                    )
                else:
                    teaches = any(
                        c.rank == move.rank and k.rank_mask != 1 << (move.rank - 1)
                        for c, k in zip(state.hands[move.target], ks)
                    )
                assert teaches, f"redundant hint {move} at seed {seed}"
            state.apply(move)


# ---------------------------------------------------------------------------
# Policy files
# ---------------------------------------------------------------------------

def test_policy_file_round_trip():
    for name in PRESET_NAMES:
        policy = preset(name)
        parsed = parse_policy(format_policy(policy), name=name)
        assert parsed.rules == policy.rules


def test_policy_file_syntax():
    text = """
    # a vdb-flavored agent
    play_safe
    play_probably_safe threshold=0.6 min_lives=2
    hint_playable track_partner_knowledge=false
    hint_useless max_tokens_condition=4
    discard_oldest
    legal_random
    """
    policy = parse_policy(text, name="custom")
    assert policy.rules[1] == PlayProbablySafe(0.6, min_lives=2)
    assert policy.rules[2] == HintPlayable(track_partner_knowledge=False)
    assert policy.rules[3] == HintUseless(max_tokens_condition=4)
    assert policy.rules[-1] == LegalRandom()


def test_policy_file_single_positional_parameter():
    policy = parse_policy("play_probably_safe 0.25\nlegal_random\n")
    assert policy.rules[0].threshold == 0.25


def test_policy_file_errors():
    with pytest.raises(ConfigurationError):
        parse_policy("warp_drive\n")
    with pytest.raises(ConfigurationError):
        parse_policy("play_safe wrong=1\n")
    with pytest.raises(ConfigurationError):
        parse_policy("")
    with pytest.raises(ConfigurationError):
        parse_policy("play_probably_safe threshold=high\n")


def test_load_policy_file(tmp_path):
    from hanabi_bench.agents import load_policy_file

    path = tmp_path / "cautious.rules"
    path.write_text("play_safe\ndiscard_oldest\nlegal_random\n")
    policy = load_policy_file(str(path))
    assert policy.name == "cautious"
    assert len(policy.rules) == 3
