import glob
import random

import tensorflow as tf

DIR_TFRECORDS = './records/'
BATCH_SIZE = 32
_keys_to_map = {}


def _parser(record):
    parsed = tf.parse_single_example(record, _keys_to_map)
    return parsed['d'], parsed['s']


def init_tfrecord_dataset():
    files_train = glob.glob(DIR_TFRECORDS + '*.tfrecord')
    random.shuffle(files_train)

    with tf.name_scope('tfr_iterator'):
        # define data from randomly ordered files
        ds = tf.data.TFRecordDataset(files_train)
        # select elements randomly from the buffer
        ds = ds.shuffle(buffer_size=10000)
        # map them based on tfrecord format
        ds = ds.map(_parser)
        # group elements in batch
        ds = ds.batch(BATCH_SIZE, drop_remainder=True)
        # iterate infinitely
        ds = ds.repeat()

        # initialize the iterator
        return ds.make_initializable_iterator()
