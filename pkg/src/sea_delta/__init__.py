"""3-chain delta massage robot with series-elastic joints.

Closed-form kinematics, encoder-only force estimation through the joint
springs, a hybrid force/position controller and a quasi-static contact
simulator, plus the ``sea-delta`` command line tool.
"""

from pathlib import Path

from .contact import ElasticPlane, contact_force
from .control import HybridControllerConfig, Mode, PidGains, estimate_state, hybrid_step
from .errors import (ConfigError, EquilibriumNotConverged, KinematicsError, SeaDeltaError,
                     SimulationError, StaticSingularity, StaticsError, Unreachable)
from .kinematics import EEPosition, JointAngles, RobotGeometry, fpk, ipk, is_reachable
from .sea_joint import SeaJointParams, SeaJointState, load_torque, motor_angle_for_torque
from .simulator import Plant, Scenario, SimConfig, run_scenario
from .statics import ChainTorques, EEForce, resultant_force, torques_for_force, virtual_work_force
from .trajectories import MassagePrimitive, Phase, Variant, from_waypoints, generate, generate_sequence

SCENARIO_DIR = Path(__file__).parent / "scenarios"

__version__ = "0.1.0"
