class WatermarkError(Exception):
    pass


class DimensionError(WatermarkError):
    def __init__(self, what: str, shape, requirement: str):
        self.shape = tuple(shape)
        super().__init__(
            "{} has shape {}; {}".format(what, "x".join(str(s) for s in self.shape), requirement)
        )


class CapacityError(WatermarkError):
    def __init__(self, payload_len: int, largest_subband_blocks: int):
        self.payload_len = payload_len
        self.largest_subband_blocks = largest_subband_blocks
        super().__init__(
            "Payload of {} bits does not fit: the largest subband only holds {} blocks".format(
                payload_len, largest_subband_blocks)
        )


class InputError(WatermarkError):
    pass
