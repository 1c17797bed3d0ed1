"""ROI-based video compression with split background/ROI quality.

Frames are either background-updating (whole frame, coarse qp) or
ROI-updating (only an enlarged ROI rectangle, fine qp); the decoder
rebuilds full frames by pasting ROI patches onto reconstructed
references. Includes a deterministic mock codec, an external-encoder
adapter, a binary container, seam smoothing, synthetic test content and
ROI-PSNR / BD-rate evaluation.
"""

from . import errors
from .codec import EncodedRegion, ExternCodec, MockCodec, quant_step
from .container import (
    FrameRecord,
    ROLE_BU,
    ROLE_RU,
    StreamHeader,
    read_stream,
    stream_bits,
    write_stream,
)
from .detector import (
    Detection,
    DetectorState,
    DiffDetector,
    SidecarDetector,
    detect_diff,
    dump_sidecar,
    load_sidecar,
    resolve_roi,
    roi_track,
)
from .enhance import (
    ExternalEnhancer,
    FeatherEnhancer,
    check_enhancer,
    feather_seam,
    make_enhancer,
)
from .geometry import BoundingBox, align_box, compressed_area, full_frame_box, union_box
from .metrics import (
    RdCurve,
    RdPoint,
    bd_rate,
    build_rd_curve,
    dump_rd_csv,
    load_rd_csv,
    psnr,
    sequence_roi_psnr,
)
from .pipeline import (
    DecodeTiming,
    EncodeStats,
    FrameStats,
    TimingReport,
    decode_video,
    decode_video_timed,
    encode_video,
    timing_report,
)
from .raster import (
    I420,
    LUMA_ONLY,
    Raster,
    VideoSequence,
    crop,
    parse_raw_i420,
    parse_y4m,
    paste,
    write_raw_i420,
    write_y4m,
)
from .scheduler import (
    BU,
    BU_BLENDING,
    GofConfig,
    ONE_BU,
    RU,
    RU_BLENDING,
    classify_frame,
    reference_for,
)
from .synth import SynthSpec, generate, object_box, preset

__version__ = "0.1.0"
