from .scenario import Agent, ChannelParams, Scenario, ZonePlacement, load_scenario, step_mobility
from .channel import rssi_at_distance
from .runner import GroundTruth, RxStream, ScenarioOutput, run_scenario
from .calibrate import calibrate_classifier, labeled_windows, loss_and_grad
from .scoring import DetectionScore, score_detection
from .defaults import office_scenario

__all__ = [
    "Agent",
    "ChannelParams",
    "DetectionScore",
    "GroundTruth",
    "RxStream",
    "Scenario",
    "ScenarioOutput",
    "ZonePlacement",
    "calibrate_classifier",
    "labeled_windows",
    "load_scenario",
    "loss_and_grad",
    "office_scenario",
    "rssi_at_distance",
    "run_scenario",
    "score_detection",
    "step_mobility",
]
