"""Protocol roles: TRC, LEA, RSU and OBU, driven by a simulated clock."""

from ringveil.ibc import SystemParams
from ringveil.messages import BroadcastMsg, RingGrant, RingListGrant, RingRequest, VehiclePublicRecord

from .clock import DEFAULT_LIST_SIZE, EPOCH_SECONDS, FRESHNESS_WINDOW, GRANT_VALIDITY, epoch_of
from .lea import lea_keygen, lea_trace
from .obu import (
    HsmBoundary,
    Receiver,
    Verdict,
    obu_accept_grant,
    obu_batch_process,
    obu_receive,
    obu_ring_request,
    obu_sign_broadcast,
)
from .rsu import RsuState, heap_path, rsu_refresh, rsu_ring_gen
from .trc import TrcState, tag_base, trc_revoke_vid, trc_setup

__all__ = [
    "BroadcastMsg", "DEFAULT_LIST_SIZE", "EPOCH_SECONDS", "FRESHNESS_WINDOW", "GRANT_VALIDITY",
    "HsmBoundary", "Receiver", "RingGrant", "RingListGrant", "RingRequest", "RsuState",
    "SystemParams", "TrcState", "Verdict", "VehiclePublicRecord", "epoch_of", "heap_path",
    "lea_keygen", "lea_trace", "obu_accept_grant", "obu_batch_process", "obu_receive",
    "obu_ring_request", "obu_sign_broadcast", "rsu_refresh", "rsu_ring_gen", "tag_base",
    "trc_revoke_vid", "trc_setup",
]
