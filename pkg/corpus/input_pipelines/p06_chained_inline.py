import tensorflow as tf

iterator = tf.data.TFRecordDataset(shards).map(parse).batch(256)  # expect: MOB001, DPM001
