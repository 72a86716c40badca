"""Plan grammar, rule planner, prompt assembly, and the model client."""

import httpx
import numpy as np
import pytest

from deixis.config import LlmConfig, load_config
from deixis.errors import (
    ArgumentSchemaMismatch,
    EmptyResponse,
    LlmTimeout,
    PlanSyntaxError,
    PreconditionViolated,
    TransportFailure,
    UnknownAction,
    UnknownPrimitive,
    Unreachable,
)
from deixis.fusion import Intention, SubCommand
from deixis.grammar import Metric, MetricUnit
from deixis.planning import (
    LlmClient,
    build_prompt,
    gripper_angle_from_width,
    parse_plan,
    plan_llm,
    plan_rule,
    serialize_plan,
)
from deixis.planning.types import ActionSequence, ActionStep
from deixis.workcell import RobotState

from conftest import make_scene

CONFIG = load_config()


def home_robot(holding=None):
    return RobotState(
        pose=tuple(CONFIG.workcell.home_pose),
        gripper_angle=CONFIG.planner.grasp.theta_max_rad,
        holding=holding,
    )


def intention(specs, scene, t=3.0):
    """specs: (action, object_id | None, Metric | None) triples."""
    subs = []
    for action, obj_id, metric in specs:
        dep = CONFIG.catalog.is_object_dependent(action)
        obj = scene.get(obj_id) if obj_id else None
        subs.append(
            SubCommand(
                action=action,
                object_dependent=dep,
                class_filter=obj.class_name if obj else None,
                obj=obj,
                metric=metric,
            )
        )
    metrics = [m for _, _, m in specs if m is not None]
    return Intention(
        subcommands=tuple(subs), omega=metrics[-1] if metrics else None, scene=scene, t_emitted=t
    )


def rule(intent, scene, robot=None):
    return plan_rule(
        intent, scene, robot or home_robot(), CONFIG.catalog, CONFIG.api,
        CONFIG.planner, CONFIG.workcell,
    )


class TestParsePlan:
    def test_single_noarg_call(self):
        seq = parse_plan("go_home()", CONFIG.api)
        assert [s.primitive for s in seq] == ["go_home"]

    def test_comments_and_blanks_ignored(self):
        text = "# approach\n\ngo_home()\n# done\n"
        assert len(parse_plan(text, CONFIG.api)) == 1

    def test_unknown_primitive(self):
        with pytest.raises(UnknownPrimitive):
            parse_plan("teleport(x=1)", CONFIG.api)

    def test_out_of_range_argument(self):
        with pytest.raises(ArgumentSchemaMismatch):
            parse_plan("close_gripper(angle=999)", CONFIG.api)

    def test_missing_argument(self):
        with pytest.raises(ArgumentSchemaMismatch):
            parse_plan("move_vertical()", CONFIG.api)

    def test_extra_argument(self):
        with pytest.raises(ArgumentSchemaMismatch):
            parse_plan("go_home(x=1)", CONFIG.api)

    @pytest.mark.parametrize(
        "bad",
        [
            "move_vertical(dz=-0.1) trailing",
            "pick up the cup",
            "move_vertical(dz=)",
            "move_vertical(dz=1e-3)",  # no exponent notation in the grammar
            "move_vertical(dz=0.1, dz=0.2)",
            "go_home(",
        ],
    )
    def test_rejected_lines(self, bad):
        with pytest.raises(PlanSyntaxError):
            parse_plan(bad, CONFIG.api)

    def test_empty_plan_rejected(self):
        with pytest.raises(PlanSyntaxError):
            parse_plan("# nothing\n", CONFIG.api)

    def test_parse_serialize_identity(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            steps = [ActionStep("go_home", {})]
            steps.append(ActionStep("move_vertical", {"dz": round(float(rng.uniform(-0.5, 0.5)), 6)}))
            steps.append(ActionStep("wait", {"seconds": round(float(rng.uniform(0, 5)), 6)}))
            seq = ActionSequence(steps=tuple(steps), provenance="llm")
            again = parse_plan(serialize_plan(seq), CONFIG.api, provenance="llm")
            assert list(again.steps) == list(seq.steps)


class TestRulePlanner:
    SCENE = make_scene([("cup-1", "cup", (0.3, 0.1, 0.02), 0.12, 0.07)])

    # hand-simulated template expansion for the single-cup pick:
    #   top = 0.02 + 0.12 = 0.14; transit = 0.14 + 0.05 (margin) + 0.01 (pad) = 0.20
    #   grasp_z = 0.02 + 0.5 * 0.12 = 0.08; descend = 0.08 - 0.20 = -0.12
    #   angle = 0.85 * (1 - 0.07 / 0.12) = 0.354167 (6 dp)
    PICK_GOLDEN = (
        "move_linear(x=0.300000, y=0.100000, z=0.200000, "
        "rx=0.000000, ry=0.000000, rz=0.000000)\n"
        "move_vertical(dz=-0.120000)\n"
        "close_gripper(angle=0.354167)\n"
        "move_vertical(dz=0.120000)"
    )

    def test_pick_expansion_matches_hand_simulation(self):
        intent = intention([("pick", "cup-1", None)], self.SCENE)
        seq = rule(intent, self.SCENE)
        assert serialize_plan(seq) == self.PICK_GOLDEN
        assert seq.provenance == "rule"

    def test_home_is_single_primitive(self):
        scene = make_scene([])
        intent = intention([("home", None, None)], scene)
        seq = rule(intent, scene)
        assert [s.primitive for s in seq] == ["go_home"]

    def test_pick_while_holding_rejected(self):
        intent = intention([("pick", "cup-1", None)], self.SCENE)
        with pytest.raises(PreconditionViolated):
            rule(intent, self.SCENE, home_robot(holding="cup-2"))

    def test_pour_without_holding_rejected(self):
        scene = make_scene(
            [("cup-1", "cup", (0.3, 0.1, 0.0), 0.12, 0.07),
             ("bowl-1", "bowl", (-0.1, 0.4, 0.0), 0.07, 0.16)]
        )
        intent = intention([("pour", "bowl-1", None)], scene)
        with pytest.raises(PreconditionViolated):
            rule(intent, scene)

    def test_pick_pour_uses_metric_angle(self):
        scene = make_scene(
            [("cup-1", "cup", (0.3, 0.1, 0.0), 0.12, 0.07),
             ("bowl-1", "bowl", (-0.1, 0.4, 0.0), 0.07, 0.16)]
        )
        intent = intention(
            [("pick", "cup-1", None), ("pour", "bowl-1", Metric(60.0, MetricUnit.DEGREES))],
            scene,
        )
        seq = rule(intent, scene)
        rotations = [s.args["angle"] for s in seq if s.primitive == "rotate_ee"]
        assert rotations == [60.0, -60.0]

    def test_pour_defaults_to_90(self):
        scene = make_scene(
            [("cup-1", "cup", (0.3, 0.1, 0.0), 0.12, 0.07),
             ("bowl-1", "bowl", (-0.1, 0.4, 0.0), 0.07, 0.16)]
        )
        intent = intention([("pick", "cup-1", None), ("pour", "bowl-1", None)], scene)
        rotations = [s.args["angle"] for s in rule(intent, scene) if s.primitive == "rotate_ee"]
        assert rotations == [90.0, -90.0]

    def test_push_near_moves_toward_base(self):
        scene = make_scene([("plate-1", "plate", (-0.35, 0.25, 0.0), 0.02, 0.2)])
        intent = intention([("push", "plate-1", Metric("near", MetricUnit.SPATIAL))], scene)
        seq = rule(intent, scene)
        slide = [s for s in seq if s.primitive == "move_linear"][-1]
        before = np.hypot(-0.35, 0.25)
        after = np.hypot(slide.args["x"], slide.args["y"])
        assert before - after == pytest.approx(CONFIG.planner.push_distance_m, abs=1e-6)

    def test_unreachable_target(self):
        scene = make_scene([("cup-1", "cup", (3.0, 0.0, 0.0), 0.12, 0.07)])
        intent = intention([("pick", "cup-1", None)], scene)
        with pytest.raises(Unreachable):
            rule(intent, scene)

    def test_gripper_angle_map(self):
        cfg = CONFIG.planner
        assert gripper_angle_from_width(0.0, cfg) == pytest.approx(0.85)
        assert gripper_angle_from_width(0.12, cfg) == pytest.approx(0.0)
        assert gripper_angle_from_width(0.24, cfg) == 0.0  # clamped
        assert gripper_angle_from_width(0.06, cfg) == pytest.approx(0.425)
        # monotone non-increasing in width
        widths = np.linspace(0.0, 0.3, 40)
        angles = [gripper_angle_from_width(w, cfg) for w in widths]
        assert all(a >= b for a, b in zip(angles, angles[1:]))


class TestBuildPrompt:
    SCENE = make_scene([("cup-1", "cup", (0.3, 0.1, 0.0), 0.12, 0.07)])

    def test_deterministic_bytes(self):
        intent = intention([("pick", "cup-1", None)], self.SCENE)
        a = build_prompt(intent, self.SCENE, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner)
        b = build_prompt(intent, self.SCENE, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner)
        assert a.text() == b.text()

    def test_payload_embeds_object_and_hold_state(self):
        intent = intention([("pick", "cup-1", None)], self.SCENE)
        bundle = build_prompt(
            intent, self.SCENE, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner
        )
        assert '"holding":null' in bundle.intention_payload
        assert '"cup-1"' in bundle.intention_payload
        assert '"height_m":0.12' in bundle.intention_payload

    def test_minimal_intent_payload_lists_no_objects(self):
        scene = make_scene([])
        intent = intention([("home", None, None)], scene)
        bundle = build_prompt(intent, scene, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner)
        assert '"scene":[]' in bundle.intention_payload

    def test_unknown_action(self):
        intent = intention([("home", None, None)], self.SCENE)
        intent.subcommands[0].action = "levitate"
        with pytest.raises(UnknownAction):
            build_prompt(intent, self.SCENE, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner)

    def test_matches_golden_file(self, tmp_path):
        import pathlib

        intent = intention([("pick", "cup-1", None)], self.SCENE)
        bundle = build_prompt(
            intent, self.SCENE, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner
        )
        golden = pathlib.Path(__file__).parent / "golden" / "prompt_pick_cup.txt"
        assert bundle.text() == golden.read_text()


def llm_cfg(retries=2, backoff=0.001, timeout=1.0):
    return LlmConfig(retries=retries, backoff_s=backoff, timeout_s=timeout)


ENV = {"DEIXIS_LLM_BASE_URL": "http://llm.test", "DEIXIS_LLM_MODEL": "planner-1"}


class TestLlmClient:
    def _bundle(self):
        scene = make_scene([("cup-1", "cup", (0.3, 0.1, 0.0), 0.12, 0.07)])
        intent = intention([("pick", "cup-1", None)], scene)
        return build_prompt(intent, scene, home_robot(), CONFIG.catalog, CONFIG.api, CONFIG.planner)

    def test_stub_passthrough(self):
        canned = "go_home()"
        transport = httpx.MockTransport(
            lambda req: httpx.Response(
                200, json={"choices": [{"message": {"content": canned}}]}
            )
        )
        client = LlmClient(llm_cfg(), transport=transport, env=ENV)
        assert plan_llm(self._bundle(), client) == canned

    def test_empty_response(self):
        transport = httpx.MockTransport(
            lambda req: httpx.Response(200, json={"choices": [{"message": {"content": " "}}]})
        )
        client = LlmClient(llm_cfg(retries=0), transport=transport, env=ENV)
        with pytest.raises(EmptyResponse):
            plan_llm(self._bundle(), client)

    def test_transport_failure_after_retries(self):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ConnectError("boom")

        client = LlmClient(llm_cfg(retries=2), transport=httpx.MockTransport(handler), env=ENV)
        with pytest.raises(TransportFailure):
            plan_llm(self._bundle(), client)
        assert len(calls) == 3  # initial + 2 retries

    def test_timeout_surfaces_as_timeout(self):
        def handler(request):
            raise httpx.ReadTimeout("slow")

        client = LlmClient(llm_cfg(retries=0), transport=httpx.MockTransport(handler), env=ENV)
        with pytest.raises(LlmTimeout):
            plan_llm(self._bundle(), client)

    def test_offline_unconfigured(self):
        client = LlmClient(llm_cfg(), env={})
        with pytest.raises(TransportFailure):
            plan_llm(self._bundle(), client)

    def test_key_never_logged(self, caplog):
        canned = "go_home()"
        transport = httpx.MockTransport(
            lambda req: httpx.Response(
                200, json={"choices": [{"message": {"content": canned}}]}
            )
        )
        env = dict(ENV, DEIXIS_LLM_API_KEY="sk-secret-123")
        client = LlmClient(llm_cfg(), transport=transport, env=env)
        with caplog.at_level("DEBUG"):
            plan_llm(self._bundle(), client)
        assert "sk-secret-123" not in caplog.text
