"""proxigraph: workplace proximity detection and contact-graph analytics.

Simulated BLE devices exchange rotating ephemeral tokens; an on-device
pipeline classifies social-distance violations and emits interventions; a
server-side temporal multi-graph answers contact-tracing, risk-propagation
and cluster queries; zone co-occupancy covers device-free areas.
"""

__version__ = "0.1.0"
