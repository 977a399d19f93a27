"""Deterministic engine for egocentric exploration of 3D node-link diagrams."""

from .ego import (
    EgoViewState,
    ViewCondition,
    apply_condition,
    assign_bubble_slots,
    clip_edge_to_sphere,
    fibonacci_sphere,
    geodesic_color,
    lowlight_set,
    morph,
)
from .errors import (
    DisconnectedError,
    EgographError,
    LabelCapacityError,
    ParameterError,
    ProtocolError,
    TaskGenerationError,
    UnknownNodeError,
)
from .events import EventLog, EventRecord
from .graphs import (
    GeneratorParams,
    Graph,
    assign_labels,
    common_neighbors,
    degree,
    diameter,
    generate_ba,
    geodesic_distances,
    neighbors,
    shortest_path,
)
from .layout import (
    LayoutParams,
    LayoutState,
    barnes_hut_repulsion,
    init_layout,
    layout_step,
    run_layout,
)
from .navigation import (
    JumpAnimation,
    NavParams,
    Pose,
    angular_deviation,
    ease,
    fly_step,
    jump_sample,
    overview_pose,
    pick_node,
    start_jump,
    teleport,
)
from .protocol import (
    Message,
    SceneFile,
    build_scene,
    decode_message,
    encode_message,
    load_scene,
    save_scene,
)
from .session import SessionEngine, replay_client_log
from .study import (
    AnalysisReport,
    StudyPlan,
    analyze,
    build_plan,
    filter_outliers,
    record_questionnaire,
    run_session,
)
from .tasks import (
    TaskKind,
    TaskResult,
    TaskSpec,
    fop_progress,
    generate_tasks,
    score_end,
    score_fcn,
    score_fip,
    score_so,
)

__version__ = "0.1.0"
