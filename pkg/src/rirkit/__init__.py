"""Room impulse response simulation with directional sources and sensors."""

from .delay import (
    DelaySplit,
    anti_alias_window,
    default_fft_size,
    mirror_spectrum,
    omni_taps,
    pattern_taps,
    split_delay,
)
from .errors import (
    ConfigurationError,
    DegenerateAnchorError,
    DegeneratePathError,
    PatternError,
    RirkitError,
)
from .geometry import (
    ImageIndex,
    ImageSource,
    RoomSpec,
    enumerate_images,
    geometry_of,
    reflection_product,
)
from .orientation import (
    DirectedEndpoint,
    Frame,
    Orientation,
    frame_from_anchors,
    mirror_anchor,
    orientation_vector,
    projection_matrix,
    sensor_orientation,
    skew_matrix,
    source_orientation,
)
from .patterns import (
    Cardioid,
    Dipole,
    Omnidirectional,
    Pattern,
    SampledGrid,
    SimplifiedSpeaker,
    SphericalHarmonics,
    Supercardioid,
    associated_legendre,
    evaluate_pattern,
    nearest_sample_lookup,
    pattern_from_dict,
    simplified_speaker,
    speaker_harmonics,
    spherical_harmonic,
)
from .renderer import (
    ImpulseResponse,
    RenderConfig,
    Transducer,
    compute_image_taps,
    is_directional,
    render,
)
from .scene import SceneConfig, emit_pattern_plot, load_scene, run_scene, write_outputs

__version__ = "0.1.0"
